//! Union and intersection sizes of neighbourhoods of random vertex tuples.

use rand::seq::index::sample;

use super::*;

/// For each trial a fresh `G(n, p)` and, for each `k`, one uniformly random
/// `k`-tuple of distinct vertices. Reports `|union of neighbourhoods|/n`
/// against `1 - (1-p)^k` and `|intersection|/n` against `p^k`.
pub fn run_neighborhood_fact(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.expect(Experiment::Fact)?;
    let n = cfg.n[0];
    let trials = par_map((0..cfg.trials as u64).collect(), |t| {
        let stream = cfg.trial_stream(t);
        let g = sample_gnp(n, cfg.p, &stream.substream("graph", 0))?;
        let mut rng = stream.substream("tuples", 0).rng();
        let sizes = cfg
            .k
            .iter()
            .map(|&k| {
                let tuple = sample(&mut rng, n, k).into_vec();
                let mut hits = vec![0usize; n];
                for &x in &tuple {
                    for &y in g.neighbors(x) {
                        hits[y] += 1;
                    }
                }
                let union = hits.iter().filter(|&&h| h > 0).count();
                let inter = hits.iter().filter(|&&h| h == k).count();
                (union, inter)
            })
            .collect::<Vec<_>>();
        Ok(sizes)
    })?;

    let mut table = Table::new(
        "k,trials,mean_union,expected_union,max_union_deviation,mean_intersection,expected_intersection,max_intersection_deviation",
    );
    let mut records = Table::new("k,trial,union,intersection");
    let mut order_violations = 0;
    let nf = n as f64;
    for (ki, &k) in cfg.k.iter().enumerate() {
        let unions: Vec<f64> = trials.iter().map(|s| s[ki].0 as f64 / nf).collect();
        let inters: Vec<f64> = trials.iter().map(|s| s[ki].1 as f64 / nf).collect();
        let eu = 1.0 - (1.0 - cfg.p).powi(k as i32);
        let ei = cfg.p.powi(k as i32);
        order_violations += trials.iter().filter(|s| s[ki].1 > s[ki].0).count();
        table.push(vec![
            k.into(),
            cfg.trials.into(),
            mean(&unions).into(),
            eu.into(),
            max_of(unions.iter().map(|u| (u - eu).abs())).into(),
            mean(&inters).into(),
            ei.into(),
            max_of(inters.iter().map(|x| (x - ei).abs())).into(),
        ]);
    }
    for (t, s) in trials.iter().enumerate() {
        for (ki, &k) in cfg.k.iter().enumerate() {
            records.push(vec![k.into(), t.into(), s[ki].0.into(), s[ki].1.into()]);
        }
    }
    let mut report = ExperimentReport::new(cfg, table);
    report.note("intersection_above_union", order_violations);
    if cfg.keep_records {
        report.records = Some(records);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_union_is_degree() {
        let mut cfg = ExperimentConfig::new(Experiment::Fact);
        cfg.n = vec![200];
        cfg.k = vec![1, 2];
        cfg.trials = 50;
        let r = run_neighborhood_fact(&cfg).unwrap();
        let row = &r.table.rows[0];
        // k = 1: union and intersection are both the degree.
        assert_eq!(row[2], row[5]);
        let sigma = (0.25f64 / (199.0 * 50.0)).sqrt();
        assert!((row[2].as_f64().unwrap() * 200.0 / 199.0 - 0.5).abs() < 4.0 * sigma);
        assert_eq!(r.summary_f64("intersection_above_union"), Some(0.0));
    }
}
