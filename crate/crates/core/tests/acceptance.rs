//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use chain_entanglement::cli;
use chain_entanglement::ed_oracle::compare_with_free_fermion;
use chain_entanglement::free_fermion::ChainSpec;
use chain_entanglement::output::{payload_digest, read_json};
use chain_entanglement::repro::{figure, BOUNDARY_KAPPAS, TLS_DELTAS};
use chain_entanglement::scan::{
    default_lambda_grid, extremum_of, find_extremum, run_scan, ExtremumKind, KappaRule, Observable,
    ScanSeries, ScanSpec,
};
use chain_entanglement::tls_boundary::{
    dc_dalpha, dc_dalpha_one_sided, sigma_x, tls_concurrence, tls_energy, Branch, TlsModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn open_scan(
    n: usize,
    kappa: KappaRule,
    pairs: Vec<(usize, usize)>,
    outputs: &[Observable],
) -> ScanSeries {
    let spec = ScanSpec::chain(n, kappa, default_lambda_grid(), pairs).with_outputs(outputs);
    let s = run_scan(&spec, workers()).expect("scan runs");
    assert!(
        s.metadata.errors.is_empty(),
        "scan point errors: {:?}",
        s.metadata.errors
    );
    s
}

fn col(s: &ScanSeries, label: &str) -> Vec<f64> {
    s.values(label).expect("column present")
}

fn oracle_equivalence() -> Outcome {
    let lambdas = [0.0, 0.2, 0.5, 0.8, 1.0, 1.1, 1.2, 1.5, 2.0];
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for n in 2..=12 {
        let pairs: Vec<(usize, usize)> = (1..=3)
            .flat_map(|d| {
                (1..=n)
                    .filter(move |&i| i + d <= n)
                    .map(move |i| (i, i + d))
            })
            .collect();
        for &l in &lambdas {
            let spec = ChainSpec::open(n, l).unwrap();
            for r in compare_with_free_fermion(&spec, &pairs).map_err(|e| e.to_string())? {
                worst = worst.max(r.deviation());
                rows += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst <= 1e-8 && secs < 60.0,
        format!("{rows} comparisons, max deviation {worst:.2e}, {secs:.1} s"),
    )
}

fn two_site_analytic() -> Outcome {
    let s = open_scan(2, KappaRule::Absolute(0.0), vec![(1, 2)], &[Observable::C]);
    let worst = s
        .params
        .iter()
        .zip(col(&s, "c@1-2"))
        .map(|(l, c)| (c - l / (4.0 + l * l).sqrt()).abs())
        .fold(0.0, f64::max);
    check(worst <= 1e-10, format!("max |C - λ/√(4+λ²)| = {worst:.2e}"))
}

fn derivative_minimum() -> Outcome {
    let run = |n| {
        let spec = ScanSpec::chain(
            n,
            KappaRule::Absolute(0.0),
            default_lambda_grid(),
            vec![(1, 2)],
        )
        .with_derivative(true);
        run_scan(&spec, workers()).expect("scan runs")
    };
    let s101 = run(101);
    let s231 = run(231);
    let e = find_extremum(&s101, "d_c@1-2", ExtremumKind::Min).map_err(|e| e.to_string())?;
    let spread = col(&s101, "d_c@1-2")
        .iter()
        .zip(col(&s231, "d_c@1-2"))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(
        !e.at_boundary && (1.05..=1.15).contains(&e.param) && spread < 1e-2,
        format!(
            "λ_min = {:.4} (grid {:.2}), max |C'_101 - C'_231| = {spread:.2e}",
            e.param, e.raw_param
        ),
    )
}

fn bulk_convergence() -> Outcome {
    let pairs: Vec<(usize, usize)> = [2].into_iter().chain(10..=50).map(|i| (i, i + 1)).collect();
    let s = open_scan(101, KappaRule::Absolute(0.0), pairs, &[Observable::C]);
    let bulk = col(&s, "c@50-51");
    let edge = col(&s, "c@2-3");
    let near = col(&s, "c@10-11");
    let mut ordered = true;
    for (k, l) in s.params.iter().enumerate() {
        if (l - 1.0).abs() <= 0.1 + 1e-12 {
            ordered &= (bulk[k] - edge[k]).abs() > (bulk[k] - near[k]).abs();
        }
    }
    let mut worst: f64 = 0.0;
    for i in 10..50 {
        let c = col(&s, &format!("c@{i}-{}", i + 1));
        worst = c
            .iter()
            .zip(&bulk)
            .map(|(a, b)| (a - b).abs())
            .fold(worst, f64::max);
    }
    check(
        ordered && worst < 1e-3,
        format!("edge farther than site 10 near λ=1: {ordered}; max |C(i,i+1) - C(50,51)|, i>=10: {worst:.2e}"),
    )
}

fn next_nearest_signs() -> Outcome {
    let s = open_scan(
        101,
        KappaRule::Absolute(0.0),
        vec![(1, 3), (2, 4), (3, 5)],
        &[Observable::CStar],
    );
    let neg_above_one = |label: &str| {
        s.params
            .iter()
            .zip(col(&s, label))
            .filter(|(l, c)| **l > 1.0 && *c < 0.0)
            .count()
    };
    // λ = 0 is the product state, where C* vanishes identically.
    let min13 = s
        .params
        .iter()
        .zip(col(&s, "c_star@1-3"))
        .filter(|(l, _)| **l > 0.0)
        .map(|(_, c)| c)
        .fold(f64::INFINITY, f64::min);
    let (n24, n35) = (neg_above_one("c_star@2-4"), neg_above_one("c_star@3-5"));
    check(
        n24 > 0 && n35 > 0 && min13 > 0.0,
        format!(
            "negative points above λ=1: (2,4) {n24}, (3,5) {n35}; min C*(1,3) for λ>0: {min13:.2e}"
        ),
    )
}

fn finite_size_saturation() -> Outcome {
    let mut maxima = Vec::new();
    for n in [51, 101, 151, 201, 231] {
        let s = open_scan(n, KappaRule::Absolute(0.0), vec![(1, 3)], &[Observable::C]);
        let e = extremum_of(&s.params, &col(&s, "c@1-3"), ExtremumKind::Max)
            .map_err(|e| e.to_string())?;
        maxima.push(e.value);
    }
    let spread = maxima.iter().cloned().fold(f64::MIN, f64::max)
        - maxima.iter().cloned().fold(f64::MAX, f64::min);
    let change = (maxima[4] - maxima[0]).abs();
    check(
        change < 1e-3 && spread < 1e-3,
        format!("max C(1,3) for N=51..231: {maxima:.6?}, change {change:.2e}"),
    )
}

fn generalized_boundary_signs() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut peaks = Vec::new();
    for &c in &BOUNDARY_KAPPAS {
        let s = open_scan(
            101,
            KappaRule::TimesLambda(c),
            vec![(1, 2), (1, 3), (2, 4)],
            &[Observable::CStar],
        );
        let x = &s.params;
        let c12 = col(&s, "c_star@1-2");
        let c13 = col(&s, "c_star@1-3");
        let c24 = col(&s, "c_star@2-4");
        let all =
            |v: &[f64], pred: &dyn Fn(f64, f64) -> bool| x.iter().zip(v).all(|(&l, &y)| pred(l, y));

        if c == 20.0 {
            let a = all(&c12, &|l, y| (l - 1.0).abs() > 0.05 + 1e-12 || y < 0.0)
                && all(&c12, &|l, y| l <= 0.0 || l > 0.8 + 1e-12 || y > 0.0);
            notes.push(format!("(a) {}", if a { "ok" } else { "FAIL" }));
            ok &= a;
        }
        let b = if c <= 1.0 {
            all(&c13, &|l, y| l <= 0.0 || y > 0.0)
        } else {
            all(&c13, &|l, y| l <= 0.0 || y < 0.0)
        };
        notes.push(format!("(b) κ={c}λ {}", if b { "ok" } else { "FAIL" }));
        ok &= b;
        if c <= 0.5 {
            let d = all(&c24, &|l, y| l < 1.25 - 1e-12 || y < 0.0);
            notes.push(format!("(c) κ={c}λ {}", if d { "ok" } else { "FAIL" }));
            ok &= d;
        } else if c >= 1.5 {
            let d = all(&c24, &|l, y| l <= 0.0 || l > 0.9 + 1e-12 || y < 0.0);
            notes.push(format!("(c) κ={c}λ {}", if d { "ok" } else { "FAIL" }));
            ok &= d;
        }
        let e = extremum_of(x, &c24, ExtremumKind::Max).map_err(|e| e.to_string())?;
        peaks.push(e.param);
        ok &= (0.8..=1.2).contains(&e.param);
    }
    notes.push(format!("(d) argmax C*(2,4): {peaks:.3?}"));
    check(ok, notes.join("; "))
}

fn third_neighbour_nullity() -> Outcome {
    let pairs: Vec<(usize, usize)> = [1, 2, 3, 5, 10, 50].iter().map(|&i| (i, i + 3)).collect();
    let mut worst = f64::MIN;
    let mut largest_c: f64 = 0.0;
    for &c in &BOUNDARY_KAPPAS {
        let s = open_scan(
            101,
            KappaRule::TimesLambda(c),
            pairs.clone(),
            &[Observable::C, Observable::CStar],
        );
        for &(i, j) in &pairs {
            largest_c = col(&s, &format!("c@{i}-{j}"))
                .into_iter()
                .fold(largest_c, f64::max);
            worst = col(&s, &format!("c_star@{i}-{j}"))
                .into_iter()
                .fold(worst, f64::max);
        }
    }
    check(
        largest_c == 0.0 && worst <= 0.0,
        format!("max C(i,i+3) = {largest_c:e}, max C*(i,i+3) = {worst:.2e}"),
    )
}

fn tls_continuity() -> Outcome {
    let mut worst: f64 = 0.0;
    let eps = 1e-8;
    for &d in &TLS_DELTAS {
        let m = TlsModel::new(d, 0.5, 1.0).unwrap();
        for a in [0.5, 1.0] {
            let e = |alpha| tls_energy(&m.with_alpha(alpha)).unwrap().0;
            let s = |alpha| sigma_x(&m.with_alpha(alpha)).unwrap();
            for f in [&e as &dyn Fn(f64) -> f64, &s] {
                let centre = f(a);
                for side in [a - eps, a + eps] {
                    worst = worst.max((f(side) - centre).abs() / centre.abs());
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fd_worst: f64 = 0.0;
    let branches = [
        (Branch::Coherent, 0.0, 0.5, false),
        (Branch::Crossover, 0.5, 0.5, false),
        (Branch::Incoherent, 0.5, 1.0, false),
        (Branch::KosterlitzThouless, 0.95, 1.0, true),
        (Branch::Localized, 1.0, 3.0, false),
    ];
    for (branch, lo, hi, overlay) in branches {
        let mut tested = 0;
        while tested < 20 {
            let alpha = if lo == hi { lo } else { rng.gen_range(lo..hi) };
            let delta = 10f64.powf(rng.gen_range(-4.0..-0.3));
            let mut m = TlsModel::new(delta, alpha, 1.0).unwrap();
            m.kt_overlay = overlay;
            if m.branch() != branch {
                continue;
            }
            let h = 1e-6 * delta;
            let fd = (tls_energy(&m.with_delta(delta + h)).unwrap().0
                - tls_energy(&m.with_delta(delta - h)).unwrap().0)
                / (2.0 * h);
            let sx = sigma_x(&m).unwrap();
            fd_worst = fd_worst.max((sx - fd).abs() / sx.abs());
            tested += 1;
        }
    }
    check(
        worst <= 1e-6 && fd_worst <= 1e-6,
        format!("max relative jump at α=½,1: {worst:.2e}; max |σx - ∂E/∂Δ|/|σx|: {fd_worst:.2e}"),
    )
}

fn tls_derivative_scaling() -> Outcome {
    let ratios: Vec<f64> = TLS_DELTAS
        .iter()
        .map(|&d| {
            let m = TlsModel::new(d, 0.5, 1.0).unwrap();
            dc_dalpha(&m, 1e-5).unwrap() / (d * (1.0 / d).ln())
        })
        .collect();
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(a, b), &r| {
        (a.min(r.abs()), b.max(r.abs()))
    });
    let scaling = hi / lo - 1.0 <= 0.05;

    let mut smooth = true;
    let mut gaps = Vec::new();
    for &d in &TLS_DELTAS {
        let m = TlsModel::new(d, 1.0, 1.0).unwrap();
        let (left, right) = dc_dalpha_one_sided(&m, 1e-3).unwrap();
        let c = tls_concurrence(&m).unwrap().concurrence;
        let gap = (left - right).abs() / c;
        smooth &= gap <= 1e-6;
        gaps.push(gap);
    }
    check(
        scaling && smooth,
        format!(
            "ratio at α=½ over Δ: {ratios:.3?} (spread {:.1}%); one-sided gap at α=1 in units of C: {gaps:.3?}",
            100.0 * (hi / lo - 1.0)
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut digests = Vec::new();
    for (run, w) in [(1, 1), (2, 1), (3, workers().max(2))] {
        let out = dir.path().join(format!("run{run}"));
        let code = cli::run(
            [
                "chainent",
                "repro",
                "fig-boundary",
                "--workers",
                &w.to_string(),
                "--out",
                out.to_str().unwrap(),
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        );
        if code != 0 {
            return Err(format!("repro exited with {code}"));
        }
        let s = read_json(&out.join("fig-boundary.json")).map_err(|e| e.to_string())?;
        digests.push(payload_digest(&s).map_err(|e| e.to_string())?);
    }
    let (label, spec) = figure("fig-boundary").unwrap().remove(0);
    assert!(label.is_empty());
    let serial = run_scan(&spec, 1).unwrap();
    let parallel = run_scan(&spec, 4).unwrap();
    check(
        digests.iter().all(|d| *d == digests[0]) && serial == parallel,
        format!(
            "payload sha256 {}… over 2 serial + 1 parallel runs; in-memory serial == parallel: {}",
            &digests[0][..12],
            serial == parallel
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("oracle equivalence, N = 2..12", oracle_equivalence),
        ("two-site analytic concurrence", two_site_analytic),
        (
            "minimum of C'(1,2) and its N independence",
            derivative_minimum,
        ),
        ("bulk convergence of C(i,i+1)", bulk_convergence),
        (
            "next-nearest sign structure, open chain",
            next_nearest_signs,
        ),
        (
            "finite-size saturation of max C(1,3)",
            finite_size_saturation,
        ),
        (
            "sign structure with boundary coupling",
            generalized_boundary_signs,
        ),
        (
            "third-neighbour concurrence vanishes",
            third_neighbour_nullity,
        ),
        ("two-level-system branch continuity", tls_continuity),
        (
            "two-level-system derivative at α = ½ and α = 1",
            tls_derivative_scaling,
        ),
        ("determinism of repro fig-boundary", determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]",
                k + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL  {name}: {detail} [{secs:.1} s]",
                    k + 1
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
