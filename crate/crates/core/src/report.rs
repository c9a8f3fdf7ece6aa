//! Machine-readable reports: a deterministic JSON emitter (floats always
//! printed with 17 significant digits so reruns are byte-identical and
//! diffable), CSV tables carrying the same values, and the named checks
//! behind each experiment's exit code.

use crate::bcheck;
use crate::constants::ExpansionConstants;
use crate::energy::{m_exponent, ExponentBook, ReducedEnergyModel};
use crate::error::{Error, Result};
use crate::fit::loglog_slope;
use crate::flow::{self, FlowOptions, FlowStatus};
use crate::interact::{interaction_numeric, SamplingPlan};
use crate::norms::{lk_norm_scan, GridRecipe};
use crate::space::SpaceSpec;
use crate::sums;
use crate::tower::TowerConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// Format a float with 17 significant digits.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Minimal JSON document model with deterministic rendering.
#[derive(Clone, Debug)]
pub enum Value {
    Bool(bool),
    UInt(u64),
    Float(f64),
    Str(String),
    Arr(Vec<Value>),
    Obj(Vec<(String, Value)>),
}

impl Value {
    pub fn obj(fields: Vec<(&str, Value)>) -> Value {
        Value::Obj(
            fields
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Value::UInt(u) => out.push_str(&u.to_string()),
            Value::Float(x) => out.push_str(&f17(*x)),
            Value::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Value::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write(out, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Value::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    out.push_str(&"  ".repeat(indent + 1));
                    out.push_str(&format!("\"{k}\": "));
                    v.write(out, indent + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Validated experiment configuration; the seed is recorded in every artifact.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: u32,
    pub m: u32,
    pub l: f64,
    pub c0: f64,
    pub delta: f64,
    pub k_list: Vec<u64>,
    pub seed: u64,
    pub eta1: f64,
    pub theta_bar: Option<f64>,
    pub flow_starts: usize,
    pub mc_samples: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 5,
            m: 1,
            l: 2.0,
            c0: 1.0,
            delta: 0.25,
            k_list: vec![],
            seed: 42,
            eta1: 1e-3,
            theta_bar: None,
            flow_starts: 100,
            mc_samples: 1_000_000,
        }
    }
}

impl RunConfig {
    /// Validate and build the space; a flat profile is rejected explicitly.
    pub fn space(&self) -> Result<SpaceSpec<f64>> {
        if self.c0 == 0.0 {
            return Err(Error::DegenerateFlat {
                what: "expansion constants",
            });
        }
        SpaceSpec::new(self.n, self.m, self.l, self.c0)
    }

    pub fn exponents(&self, spec: &SpaceSpec<f64>) -> Result<ExponentBook<f64>> {
        let mut book = ExponentBook::for_space(spec)?;
        if let Some(tb) = self.theta_bar {
            if tb <= 0.0 || tb > book.m_exponent {
                return Err(Error::InvalidConfig(format!(
                    "theta_bar must lie in (0, {}], got {tb}",
                    book.m_exponent
                )));
            }
            book.theta_bar = tb;
        }
        Ok(book)
    }

    pub fn model(&self, k: u64) -> Result<ReducedEnergyModel<f64>> {
        let spec = self.space()?;
        let constants = ExpansionConstants::compute(&spec)?;
        let exponents = self.exponents(&spec)?;
        ReducedEnergyModel::new(spec, constants, exponents, k)
    }

    fn echo(&self) -> Value {
        Value::obj(vec![
            ("N", Value::UInt(u64::from(self.n))),
            ("m", Value::UInt(u64::from(self.m))),
            ("l", Value::Float(self.l)),
            ("c0", Value::Float(self.c0)),
            ("delta", Value::Float(self.delta)),
            ("seed", Value::UInt(self.seed)),
            ("eta1", Value::Float(self.eta1)),
        ])
    }
}

/// One named pass/fail check; exit codes report the first failing id.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id,
            name,
            passed,
            detail,
        }
    }
}

fn checks_value(checks: &[Check]) -> Value {
    Value::Arr(
        checks
            .iter()
            .map(|c| {
                Value::obj(vec![
                    ("id", Value::UInt(u64::from(c.id))),
                    ("name", Value::Str(c.name.to_string())),
                    ("passed", Value::Bool(c.passed)),
                    ("detail", Value::Str(c.detail.clone())),
                ])
            })
            .collect(),
    )
}

/// A rendered report plus its checks.
#[derive(Clone, Debug)]
pub struct Report {
    pub name: &'static str,
    pub json: String,
    pub csv: Option<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn constant_rows(c: &ExpansionConstants<f64>) -> (Value, String) {
    let mut rows = vec![];
    let mut csv = String::from("name,value,abs_err,provenance\n");
    for (name, k) in c.named() {
        rows.push(Value::obj(vec![
            ("name", Value::Str(name.to_string())),
            ("value", Value::Float(k.value)),
            ("abs_err", Value::Float(k.abs_err)),
            ("provenance", Value::Str(k.provenance.as_str().to_string())),
        ]));
        csv.push_str(&format!(
            "{name},{},{},{}\n",
            f17(k.value),
            f17(k.abs_err),
            k.provenance.as_str()
        ));
    }
    (Value::Arr(rows), csv)
}

/// `constants`: the full table with `Λ₀`, `h₀`, `l_{N,m}` and `M_{m,N,l}`.
pub fn constants_report(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.space()?;
    let constants = ExpansionConstants::compute(&spec)?;
    let model = cfg.model(cfg.k_list.first().copied().unwrap_or(64))?;
    let (rows, mut csv) = constant_rows(&constants);
    let lam0 = model.lambda0();
    let h0 = model.h0();
    let l_threshold: f64 = SpaceSpec::l_threshold(cfg.n, cfg.m);
    let m_exp = m_exponent(&spec);
    for (name, v) in [
        ("Lambda0", lam0),
        ("h0", h0),
        ("l_threshold", l_threshold),
        ("M_exponent", m_exp),
    ] {
        csv.push_str(&format!(
            "{name},{},0.0000000000000000e0,closed-form\n",
            f17(v)
        ));
    }

    let mut checks = vec![];
    checks.push(Check::new(
        21,
        "constants-positive",
        constants.named().iter().all(|(_, k)| k.value > 0.0),
        "all tabulated constants strictly positive".into(),
    ));
    let b0_closed = {
        let nf = f64::from(cfg.n);
        core::f64::consts::PI.powf(nf / 2.0) * crate::special::gamma(f64::from(cfg.m))
            / crate::special::gamma((nf + 2.0 * f64::from(cfg.m)) / 2.0)
    };
    let b0_gap = (constants.b0.value / b0_closed - 1.0).abs();
    checks.push(Check::new(
        22,
        "b0-gamma-closed-form",
        b0_gap <= 1e-9,
        format!("relative gap {}", f17(b0_gap)),
    ));
    if spec.nu() == 3 {
        let gap = (constants.b2.value * 4.0 * core::f64::consts::PI - 1.0).abs();
        checks.push(Check::new(
            23,
            "b2-quarter-inv-pi",
            gap <= 1e-10,
            format!("gap {}", f17(gap)),
        ));
    }
    let prod_exact = constants.b4.value == constants.b0.value * constants.b1.value
        && constants.b5.value == constants.b0.value * constants.b2.value;
    checks.push(Check::new(
        24,
        "b4-b5-products",
        prod_exact,
        "B4 = B0*B1 and B5 = B0*B2 by construction".into(),
    ));

    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("constants".into())),
        ("config", cfg.echo()),
        ("constants", rows),
        ("Lambda0", Value::Float(lam0)),
        ("h0", Value::Float(h0)),
        ("l_threshold", Value::Float(l_threshold)),
        ("M_exponent", Value::Float(m_exp)),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "constants",
        json,
        csv: Some(csv),
        checks,
    })
}

type SumTables = (Vec<sums::SumReport<f64>>, Vec<sums::SumReport<f64>>);

fn gap_rows(
    spec: &SpaceSpec<f64>,
    constants: &ExpansionConstants<f64>,
    ks: &[u64],
    lambda_exp: f64,
) -> Result<SumTables> {
    let mut same = vec![];
    let mut cross = vec![];
    for &k in ks {
        let h = constants.h0 * (k as f64).powf(-lambda_exp);
        let cfg = TowerConfig::new(spec.clone(), u32::try_from(k).unwrap(), 1.0, h, 1.0)?;
        same.push(sums::same_report(&cfg, constants)?);
        cross.push(sums::cross_report(&cfg, constants)?);
    }
    Ok((same, cross))
}

/// `sums`: gap-vs-k tables for the user list plus the pinned criterion block.
pub fn sums_report(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.space()?;
    let constants = ExpansionConstants::compute(&spec)?;
    let lambda_exp = (spec.nu_t() - 1.0) / (spec.nu_t() + 1.0);
    let ks: Vec<u64> = if cfg.k_list.is_empty() {
        vec![64, 128, 256, 512, 1024]
    } else {
        cfg.k_list.clone()
    };
    let (same, cross) = gap_rows(&spec, &constants, &ks, lambda_exp)?;

    let table = |rows: &[sums::SumReport<f64>]| {
        Value::Arr(
            rows.iter()
                .map(|r| {
                    Value::obj(vec![
                        ("k", Value::UInt(u64::from(r.k))),
                        ("exact", Value::Float(r.exact)),
                        ("asymptotic", Value::Float(r.asymptotic)),
                        ("relative_gap", Value::Float(r.relative_gap)),
                        ("remainder_model", Value::Str(r.remainder_model.to_string())),
                    ])
                })
                .collect(),
        )
    };

    let kf: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let same_gaps: Vec<f64> = same.iter().map(|r| r.relative_gap).collect();
    let cross_gaps: Vec<f64> = cross.iter().map(|r| r.relative_gap).collect();
    let hk: Vec<f64> = ks
        .iter()
        .map(|&k| constants.h0 * (k as f64).powf(-lambda_exp) * k as f64)
        .collect();
    let same_slope_k = loglog_slope(&kf, &same_gaps);
    let cross_slope_k = loglog_slope(&kf, &cross_gaps);
    let cross_slope_hk = loglog_slope(&hk, &cross_gaps);

    // pinned criterion block: same-ring over 64..1024, cross over the
    // asymptotic window where the k-decay of the combined gap is expressed
    let crit_same_ks: Vec<u64> = vec![64, 128, 256, 512, 1024];
    let crit_cross_ks: Vec<u64> = vec![512, 1024, 2048, 4096, 8192, 16384, 32768];
    let (crit_same, _) = gap_rows(&spec, &constants, &crit_same_ks, lambda_exp)?;
    let (_, crit_cross) = gap_rows(&spec, &constants, &crit_cross_ks, lambda_exp)?;
    let crit_same_slope = loglog_slope(
        &crit_same_ks.iter().map(|&k| k as f64).collect::<Vec<_>>(),
        &crit_same.iter().map(|r| r.relative_gap).collect::<Vec<_>>(),
    );
    let crit_cross_slope = loglog_slope(
        &crit_cross_ks.iter().map(|&k| k as f64).collect::<Vec<_>>(),
        &crit_cross
            .iter()
            .map(|r| r.relative_gap)
            .collect::<Vec<_>>(),
    );
    let ratio_at_top = crit_same.last().unwrap().relative_gap;

    let mut checks = vec![];
    checks.push(Check::new(
        11,
        "same-ratio-at-k1024",
        ratio_at_top <= 0.05,
        format!("|exact/asym - 1| = {}", f17(ratio_at_top)),
    ));
    checks.push(Check::new(
        12,
        "same-gap-slope",
        crit_same_slope <= -1.6,
        format!("slope {} over k in 64..1024", f17(crit_same_slope)),
    ));
    checks.push(Check::new(
        13,
        "cross-gap-slope",
        (crit_cross_slope + 1.0).abs() <= 0.2,
        format!("slope {} over k in 512..32768", f17(crit_cross_slope)),
    ));
    let monotone =
        same_gaps.windows(2).all(|w| w[1] < w[0]) && cross_gaps.windows(2).all(|w| w[1] < w[0]);
    checks.push(Check::new(
        14,
        "gaps-monotone",
        monotone,
        "gaps decrease along the k list".into(),
    ));

    let mut csv = String::from("kind,k,exact,asymptotic,relative_gap,remainder_model\n");
    for r in &same {
        csv.push_str(&format!(
            "same,{},{},{},{},{}\n",
            r.k,
            f17(r.exact),
            f17(r.asymptotic),
            f17(r.relative_gap),
            r.remainder_model
        ));
    }
    for r in &cross {
        csv.push_str(&format!(
            "cross,{},{},{},{},{}\n",
            r.k,
            f17(r.exact),
            f17(r.asymptotic),
            f17(r.relative_gap),
            r.remainder_model
        ));
    }

    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("sums".into())),
        ("config", cfg.echo()),
        ("same", table(&same)),
        ("cross", table(&cross)),
        (
            "slopes",
            Value::obj(vec![
                ("same_vs_k", Value::Float(same_slope_k)),
                ("cross_vs_k", Value::Float(cross_slope_k)),
                ("cross_vs_hk", Value::Float(cross_slope_hk)),
            ]),
        ),
        (
            "criterion",
            Value::obj(vec![
                ("same_slope_64_1024", Value::Float(crit_same_slope)),
                ("same_gap_at_1024", Value::Float(ratio_at_top)),
                ("cross_slope_512_32768", Value::Float(crit_cross_slope)),
            ]),
        ),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "sums",
        json,
        csv: Some(csv),
        checks,
    })
}

/// `critical`: stationarity residuals and independent 1D oracles.
pub fn critical_report(cfg: &RunConfig) -> Result<Report> {
    let model = cfg.model(cfg.k_list.first().copied().unwrap_or(64))?;
    let lam0 = model.lambda0();
    let res_l = model.lambda0_residual();
    let res_h = model.h0_residual();
    let c = model.constants.clone();
    let nu = model.spec.nu_t();
    let l = model.spec.l;
    let oracle_lam0 =
        crate::energy::two_term_minimizer(c.b4.value, c.a2.value, nu, l, lam0 / 20.0, lam0 * 20.0);
    let gap_lam0 = ((oracle_lam0 - lam0) / lam0).abs();

    let c2 = model.constants.clone();
    let kf = 100.0f64;
    let hroot = move |h: f64| {
        nu * c2.b4.value * kf.powf(nu) * h - (nu - 1.0) * c2.b5.value * kf / h.powf(nu)
    };
    let oracle_h = crate::energy::bisect(&hroot, 1e-8, 0.999, 1e-15);
    let lambda_k_100 = model.h0() * kf.powf(-model.exponents.lambda_exponent);
    let gap_h0 = ((oracle_h - lambda_k_100) / lambda_k_100).abs();

    let checks = vec![
        Check::new(
            31,
            "lambda0-stationarity",
            res_l <= 1e-10,
            format!("residual {}", f17(res_l)),
        ),
        Check::new(
            32,
            "h0-stationarity",
            res_h <= 1e-10,
            format!("residual {}", f17(res_h)),
        ),
        Check::new(
            33,
            "oracle-agreement",
            gap_lam0 <= 1e-8 && gap_h0 <= 1e-8,
            format!("lambda0 gap {}, h0 gap {}", f17(gap_lam0), f17(gap_h0)),
        ),
    ];
    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("critical".into())),
        ("config", cfg.echo()),
        ("Lambda0", Value::Float(lam0)),
        ("h0", Value::Float(model.h0())),
        ("lambda0_residual", Value::Float(res_l)),
        ("h0_residual", Value::Float(res_h)),
        ("lambda0_oracle_gap", Value::Float(gap_lam0)),
        ("h0_oracle_gap", Value::Float(gap_h0)),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "critical",
        json,
        csv: None,
        checks,
    })
}

fn box_value(b: &crate::energy::ParamBox<f64>) -> Value {
    Value::obj(vec![
        (
            "r",
            Value::Arr(vec![Value::Float(b.r.0), Value::Float(b.r.1)]),
        ),
        (
            "h",
            Value::Arr(vec![Value::Float(b.h.0), Value::Float(b.h.1)]),
        ),
        (
            "lambda",
            Value::Arr(vec![Value::Float(b.lambda.0), Value::Float(b.lambda.1)]),
        ),
        (
            "nominal_half_widths",
            Value::Arr(
                b.nominal_half_widths
                    .iter()
                    .map(|&w| Value::Float(w))
                    .collect(),
            ),
        ),
        ("lambda_clamped", Value::Bool(b.lambda_clamped)),
    ])
}

/// `energy`: levels, box and min-max bracket at one `k`.
pub fn energy_report(cfg: &RunConfig) -> Result<Report> {
    let k = cfg.k_list.first().copied().unwrap_or(64);
    let model = cfg.model(k)?;
    let (t1, t2) = model.energy_levels(cfg.eta1);
    let (lower, upper) = model.minmax_bracket(cfg.eta1, 21);
    let b = model.box_dk();
    let (rows, _) = constant_rows(&model.constants);
    let checks = vec![
        Check::new(
            41,
            "levels-ordered",
            t1 < t2,
            format!("t1 {} < t2 {}", f17(t1), f17(t2)),
        ),
        Check::new(
            42,
            "bracket-lower",
            lower,
            "F-bar above t1 on the (h, lambda) face".into(),
        ),
        Check::new(
            43,
            "bracket-upper",
            upper,
            "max F-bar on the r-segment below t2".into(),
        ),
    ];
    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("energy".into())),
        ("config", cfg.echo()),
        ("k", Value::UInt(k)),
        ("constants", rows),
        ("Lambda0", Value::Float(model.lambda0())),
        ("h0", Value::Float(model.h0())),
        ("mu_k", Value::Float(model.mu_k())),
        ("lambda_k", Value::Float(model.lambda_k())),
        ("box", box_value(&b)),
        ("t1", Value::Float(t1)),
        ("t2", Value::Float(t2)),
        (
            "bracket",
            Value::obj(vec![
                ("lower", Value::Bool(lower)),
                ("upper", Value::Bool(upper)),
            ]),
        ),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "energy",
        json,
        csv: None,
        checks,
    })
}

/// A sampled norm value as a JSON document.
pub fn norm_report_value(rep: &crate::norms::NormReport<f64>) -> Value {
    Value::obj(vec![
        ("k", Value::UInt(u64::from(rep.k))),
        ("tau", Value::Float(rep.tau)),
        ("value", Value::Float(rep.value)),
        (
            "argmax",
            Value::Arr(rep.argmax.iter().map(|&c| Value::Float(c)).collect()),
        ),
        ("grid_hash", Value::Str(format!("{:016x}", rep.grid_hash))),
    ])
}

/// `flow`: the full reduced-energy artifact — constants, critical
/// parameters, box, levels, seeded trajectories and the bracket.
pub fn flow_report(cfg: &RunConfig) -> Result<Report> {
    let k = cfg.k_list.first().copied().unwrap_or(64);
    let model = cfg.model(k)?;
    let starts = flow::seeded_starts(&model, cfg.flow_starts, cfg.seed, cfg.eta1);
    let opts = FlowOptions {
        eta1: cfg.eta1,
        ..Default::default()
    };
    let mut rows = vec![];
    let mut confining_exits = 0usize;
    for (i, s) in starts.iter().enumerate() {
        let rep = flow::simulate(&model, *s, cfg.seed.wrapping_add(i as u64), &opts)?;
        let (status, face) = match rep.status {
            FlowStatus::ReachedT1 => ("reached-t1", String::new()),
            FlowStatus::BudgetExhausted => ("budget-exhausted", String::new()),
            FlowStatus::LeftBox(f) => {
                if f.is_confining() {
                    confining_exits += 1;
                }
                ("left-box", f.as_str().to_string())
            }
        };
        rows.push(Value::obj(vec![
            ("seed", Value::UInt(rep.seed)),
            ("status", Value::Str(status.into())),
            ("exit_face", Value::Str(face)),
            ("steps", Value::UInt(rep.steps)),
            ("fbar_final", Value::Float(rep.fbar_final)),
            ("step_hash", Value::Str(format!("{:016x}", rep.step_hash))),
        ]));
    }
    let checks = vec![
        Check::new(
            51,
            "no-confining-face-exit",
            confining_exits == 0,
            format!("{confining_exits} trajectories left through h- or lambda-faces"),
        ),
        Check::new(
            52,
            "starts-generated",
            starts.len() == cfg.flow_starts,
            format!("{} of {} starts admissible", starts.len(), cfg.flow_starts),
        ),
    ];
    let (t1, t2) = model.energy_levels(cfg.eta1);
    let (lower, upper) = model.minmax_bracket(cfg.eta1, 21);
    let (constant_table, _) = constant_rows(&model.constants);
    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("flow".into())),
        ("config", cfg.echo()),
        ("k", Value::UInt(k)),
        ("constants", constant_table),
        ("Lambda0", Value::Float(model.lambda0())),
        ("h0", Value::Float(model.h0())),
        ("box", box_value(&model.box_dk())),
        ("t1", Value::Float(t1)),
        ("t2", Value::Float(t2)),
        ("flow_runs", Value::Arr(rows)),
        (
            "bracket",
            Value::obj(vec![
                ("lower", Value::Bool(lower)),
                ("upper", Value::Bool(upper)),
            ]),
        ),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "flow",
        json,
        csv: None,
        checks,
    })
}

/// `residual`: the `‖l_k‖` scan table with slope vs. predicted bound.
pub fn residual_report(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.space()?;
    let constants = ExpansionConstants::compute(&spec)?;
    let exponents = cfg.exponents(&spec)?;
    let ks: Vec<u64> = if cfg.k_list.is_empty() {
        vec![8, 16, 32, 64]
    } else {
        cfg.k_list.clone()
    };
    let recipe = GridRecipe {
        seed: cfg.seed,
        ..GridRecipe::default()
    };
    let profile_k = crate::kprofile::KProfile::new(cfg.c0, cfg.l, cfg.delta)?;
    let scan = lk_norm_scan(&spec, &constants, &exponents, &ks, &profile_k, &recipe)?;

    let mut csv = String::from("k,norm,predicted_bound,slope\n");
    for row in &scan.rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            row.k,
            f17(row.norm),
            f17(scan.predicted_bound),
            f17(scan.slope)
        ));
    }
    let monotone = scan.rows.windows(2).all(|w| w[1].norm < w[0].norm);
    let checks = vec![
        Check::new(
            61,
            "lk-slope-bound",
            scan.slope <= scan.predicted_bound + 0.3,
            format!(
                "slope {} vs bound {}",
                f17(scan.slope),
                f17(scan.predicted_bound)
            ),
        ),
        Check::new(
            62,
            "lk-monotone",
            monotone,
            "norms decrease along the k list".into(),
        ),
    ];
    let rows = Value::Arr(
        scan.rows
            .iter()
            .map(|r| {
                Value::obj(vec![
                    ("k", Value::UInt(r.k)),
                    ("norm", Value::Float(r.norm)),
                    ("grid_hash", Value::Str(format!("{:016x}", r.grid_hash))),
                ])
            })
            .collect(),
    );
    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("residual".into())),
        ("config", cfg.echo()),
        ("rows", rows),
        ("slope", Value::Float(scan.slope)),
        ("predicted_bound", Value::Float(scan.predicted_bound)),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "residual",
        json,
        csv: Some(csv),
        checks,
    })
}

/// `interaction`: Monte-Carlo interaction decay versus the `B0` law.
pub fn interaction_report(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.space()?;
    let b0 = crate::constants::const_b0(&spec)?.value;
    let nu = spec.nu_t();
    let ds = [20.0f64, 40.0, 80.0];
    let mut rows = vec![];
    let mut scaled = vec![];
    let mut csv = String::from("d,estimate,stderr,scaled\n");
    for (i, &d) in ds.iter().enumerate() {
        let est = interaction_numeric(
            &spec,
            d,
            1.0,
            SamplingPlan {
                n_samples: cfg.mc_samples,
                seed: cfg.seed.wrapping_add(i as u64),
            },
        )?;
        let s = est.value * d.powf(nu);
        scaled.push((d, est, s));
        csv.push_str(&format!(
            "{d},{},{},{}\n",
            f17(est.value),
            f17(est.stderr),
            f17(s)
        ));
        rows.push(Value::obj(vec![
            ("d", Value::Float(d)),
            ("estimate", Value::Float(est.value)),
            ("stderr", Value::Float(est.stderr)),
            ("scaled", Value::Float(s)),
            ("n_samples", Value::UInt(est.n_samples)),
            ("seed", Value::UInt(est.seed)),
        ]));
    }
    let xs: Vec<f64> = scaled.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = scaled.iter().map(|r| r.1.value).collect();
    let slope = loglog_slope(&xs, &ys);
    let last = scaled.last().unwrap();
    let tol = (3.0 * last.1.stderr * last.0.powf(nu)).max(0.05 * b0);
    let checks = vec![
        Check::new(
            71,
            "interaction-b0-limit",
            (last.2 - b0).abs() <= tol,
            format!(
                "scaled {} vs B0 {} (tol {})",
                f17(last.2),
                f17(b0),
                f17(tol)
            ),
        ),
        Check::new(
            72,
            "interaction-decay-slope",
            (slope + nu).abs() <= 0.1,
            format!("slope {}", f17(slope)),
        ),
    ];
    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("interaction".into())),
        ("config", cfg.echo()),
        ("B0", Value::Float(b0)),
        ("rows", Value::Arr(rows)),
        ("slope", Value::Float(slope)),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "interaction",
        json,
        csv: Some(csv),
        checks,
    })
}

/// `bcheck`: the convolution and pair-splitting inequalities.
pub fn bcheck_report(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.space()?;
    let (conv, conv_ok) =
        bcheck::convolution_bound_check(&spec, 1.0, cfg.mc_samples / 4, cfg.seed)?;
    let (pair, pair_ok) =
        bcheck::pair_split_check(&spec, 2.0, 3.0, 1.5, cfg.mc_samples / 16, cfg.seed)?;
    let checks = vec![
        Check::new(
            81,
            "convolution-bounded",
            conv_ok,
            "ratio spread within factor 3".into(),
        ),
        Check::new(
            82,
            "pair-split-stable",
            pair_ok,
            "empirical constant stable within factor 2".into(),
        ),
    ];
    let json = Value::obj(vec![
        ("schema_version", Value::UInt(u64::from(SCHEMA_VERSION))),
        ("report", Value::Str("bcheck".into())),
        ("config", cfg.echo()),
        (
            "convolution",
            Value::Arr(
                conv.iter()
                    .map(|p| {
                        Value::obj(vec![
                            ("y_norm", Value::Float(p.y_norm)),
                            ("integral", Value::Float(p.integral)),
                            ("stderr", Value::Float(p.stderr)),
                            ("ratio", Value::Float(p.ratio)),
                        ])
                    })
                    .collect(),
            ),
        ),
        (
            "pair_split",
            Value::Arr(
                pair.iter()
                    .map(|p| {
                        Value::obj(vec![
                            ("separation", Value::Float(p.separation)),
                            ("empirical_c", Value::Float(p.empirical_c)),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("checks", checks_value(&checks)),
    ])
    .render();
    Ok(Report {
        name: "bcheck",
        json,
        csv: None,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_17_digits() {
        assert_eq!(f17(1.0), "1.0000000000000000e0");
        assert_eq!(f17(core::f64::consts::PI), "3.1415926535897931e0");
    }

    #[test]
    fn json_rendering_deterministic() {
        let v = Value::obj(vec![
            ("a", Value::Float(0.1)),
            ("b", Value::Arr(vec![Value::UInt(1), Value::Bool(true)])),
            ("s", Value::Str("x\"y".into())),
        ]);
        assert_eq!(v.render(), v.render());
        assert!(v.render().contains("1.0000000000000001e-1"));
        assert!(v.render().contains("\"x\\\"y\""));
    }

    #[test]
    fn degenerate_flat_rejected() {
        let cfg = RunConfig {
            c0: 0.0,
            ..Default::default()
        };
        assert!(matches!(cfg.space(), Err(Error::DegenerateFlat { .. })));
        assert!(matches!(
            constants_report(&cfg),
            Err(Error::DegenerateFlat { .. })
        ));
    }

    #[test]
    fn constants_report_reproducible_and_green() {
        let cfg = RunConfig::default();
        let a = constants_report(&cfg).unwrap();
        let b = constants_report(&cfg).unwrap();
        assert_eq!(a.json, b.json);
        assert_eq!(a.csv, b.csv);
        assert!(a.first_failure().is_none(), "{:?}", a.first_failure());
    }

    #[test]
    fn csv_and_json_carry_identical_values() {
        let cfg = RunConfig::default();
        let rep = constants_report(&cfg).unwrap();
        let csv = rep.csv.unwrap();
        // spot-check one value appears identically in both renderings
        let b0_line = csv.lines().find(|l| l.starts_with("B0,")).unwrap();
        let b0_value = b0_line.split(',').nth(1).unwrap();
        assert!(rep.json.contains(b0_value));
    }

    #[test]
    fn critical_report_checks_pass() {
        let rep = critical_report(&RunConfig::default()).unwrap();
        assert!(rep.first_failure().is_none(), "{:?}", rep.first_failure());
    }

    #[test]
    fn flow_report_carries_full_energy_schema() {
        let cfg = RunConfig {
            flow_starts: 2,
            ..Default::default()
        };
        let rep = flow_report(&cfg).unwrap();
        for field in [
            "\"k\"",
            "\"constants\"",
            "\"Lambda0\"",
            "\"h0\"",
            "\"box\"",
            "\"t1\"",
            "\"t2\"",
            "\"flow_runs\"",
            "\"bracket\"",
        ] {
            assert!(rep.json.contains(field), "missing {field}");
        }
    }

    #[test]
    fn norm_report_serializes() {
        let rep = crate::norms::NormReport {
            k: 4,
            tau: 0.34,
            value: 1.5,
            argmax: vec![0.0, 1.0],
            grid_hash: 0xabc,
        };
        let json = norm_report_value(&rep).render();
        assert!(json.contains("\"value\": 1.5000000000000000e0"));
        assert!(json.contains("0000000000000abc"));
    }
}
