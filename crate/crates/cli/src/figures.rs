//! Premium series for the six figure panels, all with λ = μ = 1.
//!
//! | panel | swept | fixed | series |
//! |-------|-------|-------|--------|
//! | 2a | m | θ = 0.25, x = 2.5 | q |
//! | 2b | θ | q = 0.05, x = 4.5 | m |
//! | 2c | m | θ = 0.5, q = 0.05 | x |
//! | 3a | θ | q = 0.05, x = 4c | m |
//! | 3b | θ | m = 1, x = 2.5 | q |
//! | 3c | θ | m = 1, q = 0.05 | x |

use std::io::Write;

use rci_core::{Contract, ModelSpec, PremiumQuery, PricerConfig};

use crate::args::{FiguresArgs, Variable};
use crate::curve::{evaluate, to_csv, CurvePoint};
use crate::{create_dir, grid, write_file, CliError};

pub const Q_SERIES: [f64; 3] = [0.01, 0.05, 0.1];
pub const X_SERIES: [f64; 3] = [1.5, 2.5, 4.5];
pub const M_SERIES: [f64; 3] = [0.0, 0.5, 1.0];

pub fn m_grid() -> Vec<f64> {
    grid(0.0, 3.0, 0.05).expect("static grid")
}

pub fn theta_grid() -> Vec<f64> {
    grid(0.1, 1.0, 0.02).expect("static grid")
}

fn point(variable: Variable, theta: f64, q: f64, x: f64, m: f64) -> Result<CurvePoint, CliError> {
    let model =
        ModelSpec::classical_from_loading(1.0, 1.0, theta).map_err(rci_core::Error::from)?;
    let value = match variable {
        Variable::M => m,
        Variable::Theta => theta,
        Variable::Q => q,
        Variable::X => x,
    };
    Ok(CurvePoint {
        variable,
        value,
        model,
        query: PremiumQuery::new(q, x, Contract::ExtremeLoss { m })?,
    })
}

/// Grid points of every panel, keyed by file stem.
pub fn panels() -> Result<Vec<(&'static str, Vec<CurvePoint>)>, CliError> {
    let (ms, thetas) = (m_grid(), theta_grid());
    let mut out = Vec::new();

    let mut p = Vec::new();
    for &q in &Q_SERIES {
        for &m in &ms {
            p.push(point(Variable::M, 0.25, q, 2.5, m)?);
        }
    }
    out.push(("fig2a", p));

    let mut p = Vec::new();
    for &m in &M_SERIES {
        for &t in &thetas {
            p.push(point(Variable::Theta, t, 0.05, 4.5, m)?);
        }
    }
    out.push(("fig2b", p));

    let mut p = Vec::new();
    for &x in &X_SERIES {
        for &m in &ms {
            p.push(point(Variable::M, 0.5, 0.05, x, m)?);
        }
    }
    out.push(("fig2c", p));

    let mut p = Vec::new();
    for &m in &M_SERIES {
        for &t in &thetas {
            // x = 4c with c = (1 + θ) λ / μ
            p.push(point(Variable::Theta, t, 0.05, 4.0 * (1.0 + t), m)?);
        }
    }
    out.push(("fig3a", p));

    let mut p = Vec::new();
    for &q in &Q_SERIES {
        for &t in &thetas {
            p.push(point(Variable::Theta, t, q, 2.5, 1.0)?);
        }
    }
    out.push(("fig3b", p));

    let mut p = Vec::new();
    for &x in &X_SERIES {
        for &t in &thetas {
            p.push(point(Variable::Theta, t, 0.05, x, 1.0)?);
        }
    }
    out.push(("fig3c", p));
    Ok(out)
}

pub fn cmd_figures(args: &FiguresArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = PricerConfig {
        boundary: args.boundary_terms.into(),
        ..PricerConfig::default()
    };
    let mut files = Vec::new();
    for (stem, points) in panels()? {
        files.push((stem, to_csv(&evaluate(&points, cfg)?)));
    }
    create_dir(&args.out)?;
    for (stem, csv) in files {
        let path = args.out.join(format!("{stem}.csv"));
        write_file(&path, &csv)?;
        writeln!(out, "{}", path.display()).map_err(|e| CliError::io(&path, e))?;
    }
    Ok(())
}
