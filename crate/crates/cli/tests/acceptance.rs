//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use bellpauli::{
    adapted_ancestral_samples, bell_difference_samples, bell_sample, empirical, entropies,
    estimate_imaginarity_from_samples, imaginarity, imaginarity_sample_count, make_t_doped, pauli_distribution,
    rng_from_seed, tv_distance, ExactPauliMarginals, ExactPauliSampler, MarginalEstimator, PauliString, PureState,
    QubitOrdering, Rng, C64,
};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use xpcli::{digest, fig_sweep, read_csv, ExperimentConfig, ProtocolName, Result, ResultRow, RowKind};

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Result<Outcome>);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn counts(n: usize, xs: &[PauliString]) -> Vec<u64> {
    let mut c = vec![0u64; 1 << (2 * n)];
    for x in xs {
        c[x.index()] += 1;
    }
    c
}

/// Pearson p-value, bins with expected count < 5 pooled.
fn chi2_pvalue(counts: &[u64], probs: &[f64]) -> f64 {
    let total = counts.iter().sum::<u64>() as f64;
    let (mut stat, mut dof, mut po, mut pe) = (0.0, 0usize, 0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * total;
        if e < 5.0 {
            po += c as f64;
            pe += e;
        } else {
            stat += (c as f64 - e).powi(2) / e;
            dof += 1;
        }
    }
    if pe > 0.0 {
        stat += (po - pe).powi(2) / pe.max(1e-12);
        dof += 1;
    }
    1.0 - ChiSquared::new(dof.saturating_sub(1).max(1) as f64).unwrap().cdf(stat)
}

fn exact_values() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for t in 1..=4 {
        let s = PureState::product(&"T".repeat(t))?;
        let m1 = entropies(&s, &[1.0])?.m(1.0).unwrap();
        worst = worst.max((m1 - t as f64 / 2.0).abs());
    }
    let t = PureState::t_state();
    let m0 = entropies(&t, &[0.0])?.m(0.0).unwrap();
    let m0_err = (m0 - (3f64.log2() - 1.0)).abs();
    let mut p = pauli_distribution(&t)?.probabilities().to_vec();
    p.sort_by(f64::total_cmp);
    let p_err = p.iter().zip([0.0, 0.25, 0.25, 0.5]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Ok(check(
        worst <= 1e-9 && m0_err <= 1e-9 && p_err <= 1e-9 && secs < 1.0,
        format!("max|M1-t/2|={worst:.1e} M0={m0:.6} p_err={p_err:.1e} runtime={secs:.3}s (tol 1e-9, <1s)"),
    ))
}

fn lemma_suite() -> Result<Outcome> {
    let start = Instant::now();
    let checks = xpcli::lemma_suite(0)?;
    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({:.3} vs {:.3})", c.name, c.observed, c.limit))
        .collect();
    Ok(check(
        failed.is_empty() && secs < 300.0,
        format!(
            "{}/{} checks pass, runtime={secs:.1}s; failing: [{}]",
            checks.len() - failed.len(),
            checks.len(),
            failed.join(", ")
        ),
    ))
}

fn sampler_oracle() -> Result<Outcome> {
    let mut rng = rng_from_seed(101);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let s = PureState::haar_random(4, &mut rng)?;
        let oracle = ExactPauliMarginals::new(&s, QubitOrdering::identity(4))?;
        let (xs, _) = adapted_ancestral_samples(&oracle, 100_000, &mut rng)?;
        worst = worst.max(tv_distance(&empirical(4, &xs), pauli_distribution(&s)?.probabilities()));
    }
    let s = PureState::product("T000")?;
    let est = MarginalEstimator::new(&bell_sample(&s, 100_000, &mut rng)?, QubitOrdering::identity(4))?;
    let (xs, _) = adapted_ancestral_samples(&est, 100_000, &mut rng)?;
    let tv_bell = tv_distance(&empirical(4, &xs), pauli_distribution(&s)?.probabilities());
    Ok(check(
        worst <= 0.02 && tv_bell <= 0.05,
        format!("exact marginals max TV={worst:.4} (tol 0.02); T+|000> from Bell data TV={tv_bell:.4} (tol 0.05)"),
    ))
}

fn real_state(n: usize, rng: &mut Rng) -> Result<PureState> {
    let amps = PureState::haar_random(n, rng)?.amplitudes().iter().map(|a| C64::new(a.re, 0.0)).collect();
    Ok(PureState::normalized(amps)?)
}

fn fast_paths() -> Result<Outcome> {
    const ALPHA: f64 = 1e-3;
    let mut rng = rng_from_seed(102);
    let mut direct = f64::INFINITY;
    for n in 1..=4 {
        let s = real_state(n, &mut rng)?;
        let ds = bell_sample(&s, 100_000, &mut rng)?;
        direct = direct.min(chi2_pvalue(&counts(n, ds.outcomes()), pauli_distribution(&s)?.probabilities()));
    }
    let mut diff = f64::INFINITY;
    for n in 1..=4 {
        let s = make_t_doped(n, 0, &mut rng)?;
        let xs = bell_difference_samples(bell_sample(&s, 200_000, &mut rng)?.outcomes())?;
        diff = diff.min(chi2_pvalue(&counts(n, &xs), pauli_distribution(&s)?.probabilities()));
    }
    Ok(check(
        direct > ALPHA && diff > ALPHA,
        format!("min chi2 p-value: Bell-direct real={direct:.3}, Bell-difference stabilizer={diff:.3} (alpha {ALPHA})"),
    ))
}

fn summary(rows: &[ResultRow], proto: ProtocolName, t: usize, n2: u64) -> &ResultRow {
    rows.iter()
        .find(|r| r.row_kind == RowKind::Summary && r.protocol == proto.as_str() && r.t == Some(t) && r.n2 == Some(n2))
        .expect("grid point present")
}

fn sweep_trends() -> Result<Outcome> {
    // ties below float dust count as monotone
    const DUST: f64 = 1e-12;
    let start = Instant::now();
    let cfg = ExperimentConfig::fig_sweep_default();
    let rows = fig_sweep(&cfg)?;
    let sw = cfg.sweep.as_ref().unwrap();
    let err = |t, n2| summary(&rows, ProtocolName::Symmetric, t, n2).abs_error.unwrap();
    let sd = |p, t, n2| summary(&rows, p, t, n2).stddev.unwrap();
    let mut problems = vec![];
    let base = err(0, 100);
    if base > 0.05 {
        problems.push(format!("t=0,N2=100 error {base:.3}"));
    }
    for &n2 in &sw.n2_values {
        for w in sw.t_values.windows(2) {
            if err(w[1], n2) + DUST < err(w[0], n2) {
                problems.push(format!("not nondecreasing in t at N2={n2}, t={}", w[1]));
            }
        }
    }
    for &t in &sw.t_values {
        for w in sw.n2_values.windows(2) {
            if err(t, w[1]) > err(t, w[0]) + DUST {
                problems.push(format!("not nonincreasing in N2 at t={t}, N2={}", w[1]));
            }
        }
        if t >= 2 {
            for &n2 in &sw.n2_values {
                if sd(ProtocolName::Asymmetric, t, n2) <= sd(ProtocolName::Symmetric, t, n2) {
                    problems.push(format!("std(asym) <= std(sym) at t={t}, N2={n2}"));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 1800.0 {
        problems.push(format!("runtime {secs:.0}s"));
    }
    Ok(check(
        problems.is_empty(),
        format!(
            "t=0,N2=100 error={base:.2e} (tol 0.05); t=6 errors by N2: {:.4}/{:.4}/{:.4}; runtime={secs:.1}s{}",
            err(6, 100),
            err(6, 1000),
            err(6, 10_000),
            if problems.is_empty() { String::new() } else { format!("; {}", problems.join("; ")) }
        ),
    ))
}

fn imaginarity_count() -> Result<Outcome> {
    let (eps, delta) = (0.1, 0.05);
    let k = imaginarity_sample_count(eps, 0.0, delta)?;
    let mut rng = rng_from_seed(103);
    let trials = 200;
    let mut hits = 0;
    for _ in 0..trials {
        let s = PureState::haar_random(4, &mut rng)?;
        let sampler = ExactPauliSampler::new(&s)?;
        let xs: Vec<_> = (0..k).map(|_| sampler.sample(&mut rng)).collect();
        hits += ((estimate_imaginarity_from_samples(&xs)? - imaginarity(&s)).abs() <= eps) as usize;
    }
    let rate = hits as f64 / trials as f64;
    Ok(check(rate >= 1.0 - delta, format!("k={k}, {hits}/{trials} within {eps} ({:.1}%, need >= 95%)", 100.0 * rate)))
}

fn xpcli(args: &[&str], config: &std::path::Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_xpcli")).args(args).arg("--config").arg(config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn determinism() -> Result<Outcome> {
    let dir = std::env::temp_dir().join(format!("xpcli-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let sweep = dir.join("sweep.toml");
    std::fs::write(
        &sweep,
        "experiment = \"det\"\nseed = 1\ntrials = 3\n[sweep]\nn = 5\nt_values = [0, 2]\nn2_values = [100]\nn1 = 100\nlambda = 0.1\nprotocols = [\"symmetric\", \"asymmetric\"]\n",
    )?;
    let ip = dir.join("ip.toml");
    std::fs::write(
        &ip,
        "experiment = \"det\"\nseed = 2\ntrials = 3\n[sampler]\nmode = \"ancestral_from_bell\"\nn_bell = 2000\nordering = \"identity\"\n[rho]\nkind = \"t_doped\"\nn = 3\nt = 1\n[protocol]\nprotocols = [\"symmetric\", \"asymmetric\"]\nn1 = 100\nn2 = 100\n",
    )?;
    let sample = dir.join("sample.toml");
    std::fs::write(
        &sample,
        "experiment = \"det\"\nseed = 3\n[rho]\nkind = \"bell_pairs\"\nn = 4\n[sample]\nn_bell = 2000\nn_out = 500\nordering = \"greedy\"\n",
    )?;
    let csv_digest = |b: Vec<u8>| digest(&read_csv(b.as_slice()).unwrap());
    let same = [
        csv_digest(xpcli(&["fig-sweep", "--threads", "1"], &sweep))
            == csv_digest(xpcli(&["fig-sweep", "--threads", "4"], &sweep)),
        csv_digest(xpcli(&["ip-run", "--threads", "1"], &ip)) == csv_digest(xpcli(&["ip-run", "--threads", "4"], &ip)),
        xpcli(&["pauli-sample"], &sample) == xpcli(&["pauli-sample"], &sample),
    ];
    std::fs::remove_dir_all(&dir)?;
    Ok(check(
        same.iter().all(|&s| s),
        format!("fig-sweep/ip-run/pauli-sample identical across reruns and thread counts: {same:?}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("exact-values", exact_values),
        ("lemma-suite", lemma_suite),
        ("sampler-oracle-equivalence", sampler_oracle),
        ("fast-paths", fast_paths),
        ("protocol-sweep-trends", sweep_trends),
        ("imaginarity-sample-count", imaginarity_count),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let line = match f() {
            Ok(Ok(d)) => format!("PASS {name}: {d}"),
            Ok(Err(d)) => format!("FAIL {name}: {d}"),
            Err(e) => format!("FAIL {name}: error {e}"),
        };
        failures += line.starts_with("FAIL") as usize;
        println!("{line}");
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
