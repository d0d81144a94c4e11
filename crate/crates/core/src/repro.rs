//! Pinned scan specifications for the figure data sets.

use crate::error::{Error, Result};
use crate::scan::{default_lambda_grid, linspace, KappaRule, Observable, ScanSpec};

pub const FIGURES: [&str; 6] = [
    "fig-boundary",
    "fig-nextnearest",
    "fig-kopplung",
    "fig-kopplung2",
    "fig-finite-size",
    "fig-tls",
];

pub const BOUNDARY_KAPPAS: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 20.0];
pub const FINITE_SIZES: [usize; 5] = [51, 101, 151, 201, 231];
pub const TLS_DELTAS: [f64; 3] = [1e-4, 1e-3, 1e-2];

/// Named scan specs making up one figure, in output order.
pub fn figure(name: &str) -> Result<Vec<(String, ScanSpec)>> {
    let open = |pairs: Vec<(usize, usize)>| {
        ScanSpec::chain(101, KappaRule::Absolute(0.0), default_lambda_grid(), pairs)
    };
    let kappa_family = |pairs: Vec<(usize, usize)>, outputs: &[Observable]| {
        BOUNDARY_KAPPAS
            .iter()
            .map(|&c| {
                let rule = KappaRule::TimesLambda(c);
                let spec = ScanSpec::chain(101, rule, default_lambda_grid(), pairs.clone())
                    .with_outputs(outputs);
                (format!("kappa-{rule}"), spec)
            })
            .collect::<Vec<_>>()
    };
    let specs = match name {
        "fig-boundary" => vec![(
            String::new(),
            open(vec![(1, 2), (2, 3), (3, 4), (5, 6), (10, 11), (50, 51)])
                .with_outputs(&[Observable::C])
                .with_derivative(true),
        )],
        "fig-nextnearest" => vec![(
            String::new(),
            open(vec![(1, 3), (2, 4), (3, 5), (5, 7), (10, 12), (50, 52)])
                .with_outputs(&[Observable::CStar, Observable::C]),
        )],
        "fig-kopplung" => kappa_family(vec![(1, 2), (2, 3)], &[Observable::CStar, Observable::C]),
        "fig-kopplung2" => kappa_family(
            vec![(1, 3), (2, 4), (1, 4)],
            &[Observable::CStar, Observable::C],
        ),
        "fig-finite-size" => FINITE_SIZES
            .iter()
            .map(|&n| {
                let spec = ScanSpec::chain(
                    n,
                    KappaRule::Absolute(0.0),
                    default_lambda_grid(),
                    vec![(1, 2), (1, 3)],
                )
                .with_outputs(&[Observable::C])
                .with_derivative(true);
                (format!("n{n}"), spec)
            })
            .collect(),
        "fig-tls" => TLS_DELTAS
            .iter()
            .map(|&d| {
                let spec = ScanSpec::tls(d, 1.0, linspace(0.0, 2.0, 201))
                    .with_outputs(&Observable::TLS)
                    .with_derivative(true);
                (format!("delta-{d:e}"), spec)
            })
            .collect(),
        other => {
            return Err(Error::Input(format!(
                "unknown figure '{other}', expected one of {}",
                FIGURES.join(", ")
            )))
        }
    };
    Ok(specs)
}

/// File stem for one series of a figure.
pub fn file_stem(figure: &str, label: &str) -> String {
    if label.is_empty() {
        figure.to_string()
    } else {
        format!("{figure}-{label}")
    }
}
