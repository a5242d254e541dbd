use std::io::Write;
use std::path::PathBuf;

use rci_core::{
    make_model, premium_sweep, Contract, Execution, ModelSpec, PremiumBreakdown, PremiumQuery,
    PricerConfig,
};

use crate::args::{contract_for, ContractChoice, CurveArgs, Variable};
use crate::{fmt_num, grid, write_file, CliError};

pub const HEADER: &str = "variable,value,q,x,m_or_a,theta,premium,phi_term,kappa_term,delta_factor";

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub variable: Variable,
    pub value: f64,
    pub model: ModelSpec,
    pub query: PremiumQuery,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub point: CurvePoint,
    pub breakdown: PremiumBreakdown,
}

/// Evaluates all points, in parallel when available; rows keep point order.
pub fn evaluate(points: &[CurvePoint], cfg: PricerConfig) -> Result<Vec<CurveRow>, CliError> {
    let requests: Vec<_> = points.iter().map(|p| (p.model, p.query)).collect();
    let results = premium_sweep(&requests, cfg, Execution::default());
    points
        .iter()
        .zip(results)
        .map(|(p, r)| {
            Ok(CurveRow {
                point: *p,
                breakdown: r?,
            })
        })
        .collect()
}

fn contract_param(c: Contract) -> f64 {
    match c {
        Contract::ExtremeLoss { m } => m,
        Contract::Proportional { a } => a,
    }
}

pub fn to_csv(rows: &[CurveRow]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(HEADER);
    s.push('\n');
    for r in rows {
        let p = &r.point;
        let b = &r.breakdown;
        let theta = p.model.theta().map_or_else(|| "NA".to_string(), fmt_num);
        let fields = [
            p.variable.name().to_string(),
            fmt_num(p.value),
            fmt_num(p.query.q),
            fmt_num(p.query.x),
            fmt_num(contract_param(p.query.contract)),
            theta,
            fmt_num(b.premium),
            fmt_num(b.phi_term),
            fmt_num(b.kappa_term),
            fmt_num(b.delta_factor),
        ];
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

/// Series values of a fixed parameter; the swept one gets a single slot.
fn series(
    name: &str,
    values: &[f64],
    swept: bool,
    default: Option<f64>,
) -> Result<Vec<Option<f64>>, CliError> {
    if swept {
        if !values.is_empty() {
            return Err(CliError::Usage(format!(
                "--{name} is the swept variable and cannot also be fixed"
            )));
        }
        return Ok(vec![None]);
    }
    if values.is_empty() {
        return match default {
            Some(d) => Ok(vec![Some(d)]),
            None => Err(CliError::Usage(format!("--{name} is required"))),
        };
    }
    Ok(values.iter().map(|&v| Some(v)).collect())
}

pub fn build_points(args: &CurveArgs) -> Result<Vec<CurvePoint>, CliError> {
    let var = args.variable;
    let values = grid(args.start, args.stop, args.step)?;
    let proportional = args.contract.contract == ContractChoice::Proportional;
    if proportional && (var == Variable::M || !args.m.is_empty()) {
        return Err(CliError::Usage(
            "retention m does not apply to proportional contracts".into(),
        ));
    }
    if var == Variable::Theta && (args.model.theta.is_some() || args.model.c.is_some()) {
        return Err(CliError::Usage(
            "theta is the swept variable; give neither --theta nor --c".into(),
        ));
    }
    let qs = series("q", &args.q, var == Variable::Q, None)?;
    let xs = series("x", &args.x, var == Variable::X, None)?;
    let ms = series("m", &args.m, var == Variable::M, Some(0.0))?;
    let fixed_model = if var == Variable::Theta {
        None
    } else {
        Some(args.model.build()?)
    };
    let mut points = Vec::with_capacity(qs.len() * xs.len() * ms.len() * values.len());
    for q in &qs {
        for x in &xs {
            for m in &ms {
                for &v in &values {
                    let pick = |fixed: &Option<f64>| fixed.unwrap_or(v);
                    let model = match fixed_model {
                        Some(model) => model,
                        None => {
                            let mut raw = args.model.raw();
                            raw.theta = Some(v);
                            make_model(&raw).map_err(rci_core::Error::from)?
                        }
                    };
                    let contract = contract_for(&args.contract, pick(m))?;
                    let query = if args.contract.allow_full_share {
                        PremiumQuery::with_share_override(pick(q), pick(x), contract)?
                    } else {
                        PremiumQuery::new(pick(q), pick(x), contract)?
                    };
                    points.push(CurvePoint {
                        variable: var,
                        value: v,
                        model,
                        query,
                    });
                }
            }
        }
    }
    Ok(points)
}

pub fn cmd_curve(args: &CurveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let points = build_points(args)?;
    let cfg = PricerConfig {
        boundary: args.contract.boundary_terms.into(),
        ..PricerConfig::default()
    };
    let csv = to_csv(&evaluate(&points, cfg)?);
    match &args.out {
        Some(path) => write_file(path, &csv),
        None => out
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::io(&PathBuf::from("<stdout>"), e)),
    }
}
