//! Exceedance frequencies of operator norms and non-trivial eigenvalues.

use super::*;
use crate::bounds::tail_constants;
use crate::matrix::{sample_sym_xp_matrix, sample_xp_matrix};
use crate::spectral::{eigenvalues, operator_norm, symmetric_operator_norm};

/// For each size and `xi`:
///
/// * `sym`: `||A|| >= (2 sqrt(p(1-p)) + xi) sqrt(k)` for `A ~ M_k^sym(p)`,
///   against `4 exp(-xi^2 k / 8)`;
/// * `gnp`: `max_{i>=2} |lambda_i| >= (2 sqrt(p(1-p)) + xi) sqrt(n)`,
///   against `exp(-xi^2 n / 32)`;
/// * `nonsym`: `||A|| >= a1 sqrt(p(1-p)) sqrt(m)` for `A ~ M_{m x k}(p)`,
///   `m = ceil((1+delta) k)`, against `exp(-a2 m)` (no `xi`).
///
/// Bounds omit the `o(1)` corrections.
pub fn run_tail_mc(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.expect(Experiment::Tails)?;
    let p = cfg.p;
    let sigma2 = 2.0 * (p * (1.0 - p)).sqrt();
    let tail = tail_constants(p, cfg.delta.max(f64::MIN_POSITIVE))?;

    let jobs: Vec<(usize, u64)> = cfg
        .n
        .iter()
        .flat_map(|&s| (0..cfg.trials as u64).map(move |t| (s, t)))
        .collect();
    // Normalised statistics per sample: ||sym||/sqrt(k), max_{i>=2}|lambda_i|/sqrt(n), ||rect||/sqrt(m).
    let samples = par_map(jobs.clone(), |(size, t)| {
        let stream = cfg.trial_stream(t).substream("size", size as u64);
        let sym = sample_sym_xp_matrix(size, p, &stream.substream("sym", 0))?;
        let sym_norm = symmetric_operator_norm(&sym)? / (size as f64).sqrt();

        let g = sample_gnp(size, p, &stream.substream("gnp", 0))?;
        let vals = eigenvalues(&adjacency_matrix(&g), SortOrder::Descending)?;
        let second = max_of(vals[1..].iter().map(|x| x.abs())) / (size as f64).sqrt();

        let m = rect_rows(size, cfg.delta);
        let rect = sample_xp_matrix(m, size, p, &stream.substream("nonsym", 0))?;
        let rect_norm = operator_norm(&rect)? / (m as f64).sqrt();
        Ok([sym_norm, second, rect_norm])
    })?;

    let mut table = Table::new("model,size,xi,bound,empirical");
    let mut records = Table::new(
        "size,trial,sym_norm_over_sqrt_k,gnp_second_over_sqrt_n,nonsym_norm_over_sqrt_m",
    );
    let mut notes: Vec<(String, f64)> = Vec::new();
    for (si, &size) in cfg.n.iter().enumerate() {
        let block = &samples[si * cfg.trials..(si + 1) * cfg.trials];
        let column = |j: usize| block.iter().map(|s| s[j]).collect::<Vec<f64>>();
        let (sym, gnp, rect) = (column(0), column(1), column(2));
        let freq = |xs: &[f64], threshold: f64| {
            xs.iter().filter(|&&x| x >= threshold).count() as f64 / xs.len() as f64
        };
        let k = size as f64;
        for &xi in &cfg.xi {
            let bound = (4.0 * (-xi * xi * k / 8.0).exp()).min(1.0);
            table.push(vec![
                "sym".into(),
                size.into(),
                xi.into(),
                bound.into(),
                freq(&sym, sigma2 + xi).into(),
            ]);
        }
        for &xi in &cfg.xi {
            let bound = (-xi * xi * k / 32.0).exp();
            table.push(vec![
                "gnp".into(),
                size.into(),
                xi.into(),
                bound.into(),
                freq(&gnp, sigma2 + xi).into(),
            ]);
        }
        let m = rect_rows(size, cfg.delta) as f64;
        let bound = (-tail.a2 * m).exp();
        table.push(vec![
            "nonsym".into(),
            size.into(),
            Cell::Empty,
            bound.into(),
            freq(&rect, tail.a1 * (p * (1.0 - p)).sqrt()).into(),
        ]);
        notes.push((
            format!("size{size}_median_sym_norm_over_sqrt_k"),
            median(&sym),
        ));
        notes.push((
            format!("size{size}_median_gnp_second_over_sqrt_n"),
            median(&gnp),
        ));
        notes.push((
            format!("size{size}_median_nonsym_norm_over_sqrt_m"),
            median(&rect),
        ));
    }
    for (&(size, t), s) in jobs.iter().zip(&samples) {
        records.push(vec![
            size.into(),
            t.into(),
            s[0].into(),
            s[1].into(),
            s[2].into(),
        ]);
    }

    let mut report = ExperimentReport::new(cfg, table);
    report.note("two_sqrt_p_one_minus_p", sigma2);
    report.note(
        "nonsym_threshold_over_sqrt_m",
        tail.a1 * (p * (1.0 - p)).sqrt(),
    );
    for (k, v) in notes {
        report.note(k, v);
    }
    if cfg.keep_records {
        report.records = Some(records);
    }
    Ok(report)
}

fn rect_rows(k: usize, delta: f64) -> usize {
    ((1.0 + delta) * k as f64).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequencies_are_nested_in_xi() {
        let mut cfg = ExperimentConfig::new(Experiment::Tails);
        cfg.n = vec![30];
        cfg.trials = 30;
        cfg.xi = vec![0.05, 0.1, 0.2, 0.4];
        let r = run_tail_mc(&cfg).unwrap();
        for model in ["sym", "gnp"] {
            let freqs: Vec<f64> = r
                .table
                .rows
                .iter()
                .filter(|row| row[0] == Cell::from(model))
                .map(|row| row[4].as_f64().unwrap())
                .collect();
            assert_eq!(freqs.len(), 4);
            assert!(freqs.windows(2).all(|w| w[1] <= w[0]), "{model}: {freqs:?}");
        }
        assert_eq!(r.table.rows.len(), 9);
        assert!(r
            .table
            .to_csv()
            .starts_with("model,size,xi,bound,empirical\n"));
    }
}
