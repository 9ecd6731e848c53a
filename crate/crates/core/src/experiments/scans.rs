//! Whole-spectrum scans of `G(n, p)` (and regular) samples: domain
//! decomposition sizes, `<f, 1>`, sup norms, and the Courant-type count.

use super::*;
use crate::nodal::{nodal_summary, weak_nodal_domains, SummarySizes};

/// Per trial and adjacency eigenvector: weak and strong counts and the
/// sizes of `P_f`, `N_f`, `E_f`, `Z_f` and `E_f n Z_f`.
pub fn run_gnp_scan(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.expect(Experiment::GnpScan)?;
    let n = cfg.n[0];
    let trials = par_map((0..cfg.trials as u64).collect(), |t| {
        let g = sample_gnp(n, cfg.p, &cfg.trial_stream(t))?;
        let spec = adjacency_spectrum(&g)?;
        let sizes = spec
            .eigenvectors
            .iter()
            .map(|v| Ok(nodal_summary(&g, &cfg.tau.signed(v.clone())?)?.sizes()))
            .collect::<Result<Vec<SummarySizes>>>()?;
        Ok((g.is_connected(), sizes))
    })?;

    let mut table = Table::new("trial,index,weak,strong,P,N,E,Z,EcapZ");
    let mut histogram = BTreeMap::<usize, usize>::new();
    let (mut max_weak, mut max_strong, mut max_e, mut max_z, mut max_ez) =
        (0usize, 0usize, 0usize, 0usize, 0usize);
    let mut first_violations = 0usize;
    let mut disconnected = 0usize;
    for (t, (connected, sizes)) in trials.iter().enumerate() {
        if !connected {
            disconnected += 1;
        }
        for (i, s) in sizes.iter().enumerate() {
            table.push(vec![
                t.into(),
                (i + 1).into(),
                s.weak_count.into(),
                s.strong_count.into(),
                s.p.into(),
                s.n.into(),
                s.e.into(),
                s.z.into(),
                s.e_cap_z.into(),
            ]);
            max_z = max_z.max(s.z);
            max_ez = max_ez.max(s.e_cap_z);
            if i == 0 {
                if *connected && (s.weak_count != 1 || s.e != 0) {
                    first_violations += 1;
                }
                continue;
            }
            *histogram.entry(s.weak_count).or_default() += 1;
            max_weak = max_weak.max(s.weak_count);
            max_strong = max_strong.max(s.strong_count);
            max_e = max_e.max(s.e);
        }
    }
    let hist: Vec<String> = histogram.iter().map(|(k, v)| format!("{k}:{v}")).collect();

    let mut report = ExperimentReport::new(cfg, table);
    report.note("max_weak_nonfirst", max_weak);
    report.note("max_strong_nonfirst", max_strong);
    report.note("max_E_nonfirst", max_e);
    report.note("max_Z", max_z);
    report.note("max_EcapZ", max_ez);
    report.note("first_vector_violations", first_violations);
    report.note("disconnected_trials", disconnected);
    report.note("weak_count_histogram_nonfirst", Cell::Text(hist.join(";")));
    Ok(report)
}

/// Per trial, the largest `|<f, 1>|` over the non-first adjacency
/// eigenvectors.
pub fn run_inner_product_check(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.expect(Experiment::Inner)?;
    let n = cfg.n[0];
    let trials = par_map((0..cfg.trials as u64).collect(), |t| {
        let g = cfg.sample_graph(n, &cfg.trial_stream(t))?;
        let spec = adjacency_spectrum(&g)?;
        let inner: Vec<f64> = spec
            .eigenvectors
            .iter()
            .map(|v| v.iter().sum::<f64>().abs())
            .collect();
        Ok((g.is_connected(), inner))
    })?;

    let mut table = Table::new("trial,connected,max_abs_inner");
    let mut records = Table::new("trial,index,abs_inner");
    let mut maxima = Vec::with_capacity(trials.len());
    for (t, (connected, inner)) in trials.iter().enumerate() {
        let m = max_of(inner[1..].iter().copied());
        maxima.push(m);
        table.push(vec![t.into(), (*connected).into(), m.into()]);
        for (i, &x) in inner.iter().enumerate() {
            records.push(vec![t.into(), (i + 1).into(), x.into()]);
        }
    }
    let mut report = ExperimentReport::new(cfg, table);
    report.note("global_max", max_of(maxima.iter().copied()));
    report.note("median_of_trial_max", median(&maxima));
    report.note("mean_of_trial_max", mean(&maxima));
    report.note(
        "disconnected_trials",
        trials.iter().filter(|(c, _)| !c).count(),
    );
    if cfg.keep_records {
        report.records = Some(records);
    }
    Ok(report)
}

/// Per `n`: median, maximum and minimum of `||f||_inf` over trials and
/// eigenvectors, and the number of coordinates at or below the zero
/// threshold.
pub fn run_linf_scan(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.expect(Experiment::Linf)?;
    let jobs: Vec<(usize, u64)> = cfg
        .n
        .iter()
        .flat_map(|&n| (0..cfg.trials as u64).map(move |t| (n, t)))
        .collect();
    let trials = par_map(jobs.clone(), |(n, t)| {
        let stream = cfg.trial_stream(t).substream("n", n as u64);
        let g = sample_gnp(n, cfg.p, &stream)?;
        let spec = adjacency_spectrum(&g)?;
        spec.eigenvectors
            .iter()
            .map(|v| {
                let f = cfg.tau.signed(v.clone())?;
                let zeros = (0..n).filter(|&i| !f.sign(i).is_strict()).count();
                Ok((f.sup_norm(), zeros))
            })
            .collect::<Result<Vec<(f64, usize)>>>()
    })?;

    let mut table =
        Table::new("n,trials,median_linf,max_linf,min_linf,min_linf_sqrt_n,zero_coordinates");
    let mut records = Table::new("n,trial,index,linf,zeros");
    for (ni, &n) in cfg.n.iter().enumerate() {
        let block = &trials[ni * cfg.trials..(ni + 1) * cfg.trials];
        let norms: Vec<f64> = block.iter().flatten().map(|&(x, _)| x).collect();
        let zeros: usize = block.iter().flatten().map(|&(_, z)| z).sum();
        let min = norms.iter().copied().fold(f64::INFINITY, f64::min);
        table.push(vec![
            n.into(),
            cfg.trials.into(),
            median(&norms).into(),
            max_of(norms.iter().copied()).into(),
            min.into(),
            (min * (n as f64).sqrt()).into(),
            zeros.into(),
        ]);
    }
    for (&(n, t), trial) in jobs.iter().zip(&trials) {
        for (i, &(x, z)) in trial.iter().enumerate() {
            records.push(vec![n.into(), t.into(), (i + 1).into(), x.into(), z.into()]);
        }
    }
    let medians = table.values("median_linf");
    let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
    let total_zeros: f64 = table.values("zero_coordinates").iter().sum();

    let mut report = ExperimentReport::new(cfg, table);
    report.note("median_strictly_decreasing", decreasing);
    report.note("total_zero_coordinates", total_zeros as usize);
    if cfg.keep_records {
        report.records = Some(records);
    }
    Ok(report)
}

/// Per eigenvector index `k` (descending adjacency order): how often the
/// weak domain count exceeds `k`, over connected samples.
pub fn run_courant_report(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.expect(Experiment::Courant)?;
    let n = cfg.n[0];
    let trials = par_map((0..cfg.trials as u64).collect(), |t| {
        let g = cfg.sample_graph(n, &cfg.trial_stream(t))?;
        let spec = adjacency_spectrum(&g)?;
        let weak = spec
            .eigenvectors
            .iter()
            .map(|v| Ok(weak_nodal_domains(&g, &cfg.tau.signed(v.clone())?)?.count()))
            .collect::<Result<Vec<usize>>>()?;
        Ok((g.is_connected(), weak))
    })?;

    let connected: Vec<&Vec<usize>> = trials.iter().filter(|(c, _)| *c).map(|(_, w)| w).collect();
    let mut table = Table::new("index,trials_counted,exceed_frequency,mean_weak,max_weak");
    let mut exceeding = Vec::new();
    for i in 0..n {
        let counts: Vec<f64> = connected.iter().map(|w| w[i] as f64).collect();
        let over = connected.iter().filter(|w| w[i] > i + 1).count();
        let freq = if connected.is_empty() {
            f64::NAN
        } else {
            over as f64 / connected.len() as f64
        };
        if over > 0 {
            exceeding.push(i + 1);
        }
        table.push(vec![
            (i + 1).into(),
            connected.len().into(),
            freq.into(),
            mean(&counts).into(),
            max_of(counts.iter().copied()).into(),
        ]);
    }
    let mut report = ExperimentReport::new(cfg, table);
    report.note("disconnected_trials", trials.len() - connected.len());
    report.note("indices_exceeding", exceeding.len());
    report.note(
        "first_index_exceeding",
        exceeding.first().map_or(Cell::Empty, |&k| k.into()),
    );
    Ok(report)
}
