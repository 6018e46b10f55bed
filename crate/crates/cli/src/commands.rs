use dashu_ratio::RBig;
use rpm_core::hankel::{agreeing_digits, det_symbolic, HankelSpec, DEFAULT_TERM_LIMIT};
use rpm_core::number::{parse_rational, BigReal, Precision};
use rpm_core::observables::{energy_slope_scan, expectation, ObservableSpec};
use rpm_core::oracle::{oracle_eigenvalues, oracle_full_line, oracle_state, OracleOptions};
use rpm_core::potential::{parse_potential, symbolic_display_name};
use rpm_core::solver::{
    ensure_order, fit_rate, scan_roots, track_from, track_from_first, Root, RootSequence, SolveOptions,
};
use rpm_core::wavefunction::{eigenfunction_profile, pade_for, residual_profile};
use rpm_core::{Parity, PotentialSpec};
use serde_json::json;

use crate::config::Flags;
use crate::output::{decimal, root_record, sci, Record, Report};
use crate::{par_map, CliError};

pub enum Start {
    Energy(BigReal),
    Window(BigReal, BigReal),
}

/// Validated flags plus the precision ceiling from the environment.
pub struct Context {
    pub flags: Flags,
    pub cap: u32,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Precision wide enough to hold every digit of a decimal literal.
fn literal_precision(text: &str) -> Precision {
    Precision::new((text.len() as u32 + 20).max(60)).expect("above floor")
}

pub fn parse_real(text: &str) -> Result<BigReal, CliError> {
    BigReal::parse(text, literal_precision(text)).map_err(|_| invalid(format!("not a number: {text:?}")))
}

impl Context {
    pub fn new(flags: Flags, cap: u32) -> Result<Context, CliError> {
        if let Some(p) = flags.parity {
            Parity::from_index(p)?;
        }
        if let Some(digits) = flags.digits {
            if digits == 0 {
                return Err(invalid("--digits must be positive"));
            }
        }
        if let Some(p) = flags.precision {
            Precision::new(p)?;
        }
        if let (Some(lo), Some(hi)) = (flags.dmin, flags.dmax) {
            if lo > hi {
                return Err(invalid(format!("--dmin {lo} exceeds --dmax {hi}")));
            }
        }
        Ok(Context { flags, cap })
    }

    pub fn potential_text(&self) -> Result<&str, CliError> {
        self.flags.potential.as_deref().ok_or_else(|| invalid("--potential is required"))
    }

    pub fn potential(&self) -> Result<PotentialSpec, CliError> {
        Ok(parse_potential(self.potential_text()?, 2)?)
    }

    pub fn parity(&self) -> Parity {
        match self.flags.parity {
            Some(1) => Parity::Odd,
            _ => Parity::Even,
        }
    }

    pub fn shift(&self) -> usize {
        self.flags.shift.unwrap_or(0)
    }

    /// Digits printed; certified digits are never exceeded.
    pub fn print_cap(&self) -> u32 {
        self.flags.digits.unwrap_or(u32::MAX)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            target_digits: self.flags.digits.unwrap_or(24),
            precision: self.flags.precision.map(|p| Precision::new(p).expect("validated")),
            precision_cap: self.cap,
            ..SolveOptions::default()
        }
    }

    pub fn dims(&self, default_max: usize) -> (usize, usize) {
        let hi = self.flags.dmax.or(self.flags.dim).unwrap_or(default_max);
        (self.flags.dmin.unwrap_or(2).min(hi), hi)
    }

    /// `--window`, `--seed`, or the oracle estimate of `--state`.
    pub fn start(&self, v: &PotentialSpec, parity: Parity) -> Result<Start, CliError> {
        if let Some(w) = &self.flags.window {
            let (lo, hi) = w
                .split_once(',')
                .ok_or_else(|| invalid(format!("--window expects lo,hi, got {w:?}")))?;
            let (lo, hi) = (parse_real(lo)?, parse_real(hi)?);
            if lo >= hi {
                return Err(invalid("--window must have lo < hi"));
            }
            return Ok(Start::Window(lo, hi));
        }
        if let Some(seed) = &self.flags.seed {
            return Ok(Start::Energy(seed_value(seed)?));
        }
        let n = 2 * self.flags.state.unwrap_or(0) + parity.index() as usize;
        let e = oracle_state(v, n, &OracleOptions::default())?;
        Ok(Start::Energy(BigReal::from_f64(e, Precision::new(60).expect("above floor"))))
    }

    /// Sequences of `H_D^d` roots over the `--dmin..--dmax` range. Without an
    /// explicit `--dmin`, leading dimensions without a nearby root are skipped.
    pub fn sequences(&self, v: &PotentialSpec, parity: Parity, shift: usize, default_max: usize) -> Result<Vec<RootSequence>, CliError> {
        let (lo, hi) = self.dims(default_max);
        let opts = self.solve_options();
        match self.start(v, parity)? {
            Start::Energy(e) => {
                let seq = if self.flags.dmin.is_some() {
                    track_from(v, parity, shift, lo..=hi, &e, &opts)?
                } else {
                    track_from_first(v, parity, shift, lo..=hi, &e, &opts)?
                };
                Ok(vec![seq])
            }
            Start::Window(a, b) => {
                let spec = HankelSpec::new(lo, shift, parity)?;
                let scan = SolveOptions {
                    precision: Some(opts.precision.unwrap_or_else(|| spec.default_precision())),
                    ..opts.clone()
                };
                let starts = scan_roots(v, &spec, &a, &b, &scan)?;
                if starts.is_empty() {
                    return Err(CliError::NoConvergence(format!("no root of H_{lo}^{shift} in the window")));
                }
                let runs = par_map(&starts, |r| track_from(v, parity, shift, lo..=hi, &r.energy, &opts));
                let first_err = runs.iter().find_map(|r| r.as_ref().err().cloned());
                let kept: Vec<RootSequence> = runs.into_iter().filter_map(|r| r.ok()).collect();
                match (kept.is_empty(), first_err) {
                    (true, Some(e)) => Err(e.into()),
                    _ => Ok(kept),
                }
            }
        }
    }
}

/// A decimal seed, or `@file.json` naming an earlier report whose last
/// result carries a `root`.
pub fn seed_value(text: &str) -> Result<BigReal, CliError> {
    let Some(path) = text.strip_prefix('@') else {
        return parse_real(text);
    };
    let raw = std::fs::read_to_string(path).map_err(|e| invalid(format!("seed file {path}: {e}")))?;
    let report: serde_json::Value = serde_json::from_str(&raw).map_err(|e| invalid(format!("seed file {path}: {e}")))?;
    let root = report["results"]
        .as_array()
        .and_then(|rs| rs.iter().rev().find_map(|r| r["root"].as_str()))
        .ok_or_else(|| invalid(format!("seed file {path} has no result with a root")))?;
    parse_real(root)
}

pub fn solve(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let parity = ctx.parity();
    let mut report = Report::default();
    for (i, seq) in ctx.sequences(&v, parity, ctx.shift(), 10)?.iter().enumerate() {
        let root = seq.last().expect("nonempty sequence");
        let mut r = root_record(root, parity.index(), ctx.print_cap());
        r.insert("sequence".into(), json!(i));
        report.saw(root);
        report.push(r);
    }
    Ok(report)
}

pub fn sequence(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let parity = ctx.parity();
    let mut report = Report::default();
    for (i, seq) in ctx.sequences(&v, parity, ctx.shift(), 10)?.iter().enumerate() {
        for root in &seq.entries {
            let mut r = root_record(root, parity.index(), ctx.print_cap());
            r.insert("sequence".into(), json!(i));
            report.saw(root);
            report.push(r);
        }
    }
    Ok(report)
}

pub fn bounds(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let parity = ctx.parity();
    let cap = ctx.print_cap();
    let runs = par_map(&[0usize, 1], |&d| ctx.sequences(&v, parity, d, 10));
    let mut runs = runs.into_iter();
    let lower = runs.next().expect("two runs")?.remove(0);
    let upper = runs.next().expect("two runs")?.remove(0);
    let mut report = Report::default();
    for lo in &lower.entries {
        let Some(up) = upper.entries.iter().find(|u| u.dim == lo.dim) else {
            continue;
        };
        let gap = sci(&(&up.energy - &lo.energy), 3);
        for (root, label) in [(lo, "lower"), (up, "upper")] {
            let mut r = root_record(root, parity.index(), cap);
            r.insert("bound".into(), json!(label));
            r.insert("gap".into(), json!(gap));
            report.saw(root);
            report.push(r);
        }
    }
    Ok(report)
}

pub fn hankel_poly(ctx: &Context) -> Result<Report, CliError> {
    let text = ctx.potential_text()?;
    let v = ctx.potential()?;
    let dim = ctx.flags.dim.ok_or_else(|| invalid("--D is required"))?;
    let spec = HankelSpec::new(dim, ctx.shift(), ctx.parity())?;
    let v = ensure_order(&v, spec.max_index())?;
    let mut det = det_symbolic(&v, &spec, None, ctx.flags.term_limit.unwrap_or(DEFAULT_TERM_LIMIT))?;
    if ctx.flags.monic {
        det = det.monic();
    }
    let name = symbolic_display_name(text).unwrap_or_else(|| "p".to_string());
    let rendered = det.render("E", &name);
    let mut r = Record::new();
    r.insert("D".into(), json!(dim));
    r.insert("d".into(), json!(spec.shift));
    r.insert("parity".into(), json!(spec.parity.index()));
    r.insert("degree".into(), json!(det.degree()));
    r.insert("polynomial".into(), json!(rendered));
    Ok(Report {
        results: vec![r],
        text: Some(rendered),
        ..Report::default()
    })
}

pub fn observable(text: &str) -> Result<ObservableSpec, CliError> {
    let coeffs = text
        .split(',')
        .map(|c| parse_rational(c).ok_or_else(|| invalid(format!("observable coefficient {c:?} is not a rational"))))
        .collect::<Result<Vec<RBig>, _>>()?;
    Ok(ObservableSpec::new(coeffs)?)
}

/// `⟨A⟩` at `root` with the digits on which two precisions agree.
pub fn expectation_digits(v: &PotentialSpec, a: &ObservableSpec, spec: &HankelSpec, root: &Root) -> Result<(BigReal, u32), CliError> {
    let value = expectation(v, a, spec, &root.energy, root.precision)?;
    let fine = expectation(v, a, spec, &root.energy, root.precision.plus(20))?;
    let digits = agreeing_digits(&value, &fine, root.precision.digits()).min(root.certified_digits);
    Ok((value, digits))
}

pub fn expect(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let parity = ctx.parity();
    let a = observable(ctx.flags.observable.as_deref().unwrap_or("0,1"))?;
    let seq = ctx.sequences(&v, parity, ctx.shift(), 12)?.remove(0);
    let root = seq.last().expect("nonempty sequence");
    let spec = HankelSpec::new(root.dim, root.shift, parity)?;
    let (value, digits) = expectation_digits(&v, &a, &spec, root)?;
    let mut r = root_record(root, parity.index(), ctx.print_cap());
    r.insert("expectation".into(), json!(decimal(&value, digits.min(ctx.print_cap()))));
    r.insert("expectation_digits".into(), json!(digits));
    if let Some(step) = &ctx.flags.fd_step {
        let h = parse_rational(step).ok_or_else(|| invalid(format!("--fd-step {step:?} is not a rational")))?;
        if h == RBig::ZERO {
            return Err(invalid("--fd-step must be nonzero"));
        }
        let scan = energy_slope_scan(&v, &a, &spec, &[-h.clone(), h.clone()], &root.energy, &ctx.solve_options())?;
        let p = root.precision;
        let slope = (&scan[1].1.energy - &scan[0].1.energy) / BigReal::from_rational(&(h * RBig::from(2)), p);
        r.insert("fd_slope".into(), json!(decimal(&slope, 16)));
    }
    let mut report = Report::default();
    report.saw(root);
    report.push(r);
    Ok(report)
}

pub fn wavefunction(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let parity = ctx.parity();
    let seq = ctx.sequences(&v, parity, ctx.shift(), 8)?.remove(0);
    let root = seq.last().expect("nonempty sequence");
    let spec = HankelSpec::new(root.dim, root.shift, parity)?;
    let (m, n) = spec.pade_orders();
    let p = pade_for(&v, parity, &root.energy, m, n, root.precision)?;
    let xmax = match ctx.flags.xmax {
        Some(x) if x > 0.0 => x,
        Some(x) => return Err(invalid(format!("--xmax must be positive, got {x}"))),
        None => p.poles.first().map_or(4.0, |pole| (0.9 * pole).min(4.0)),
    };
    let points = ctx.flags.points.unwrap_or(41).max(2);
    let target = ctx.flags.digits.unwrap_or(20).min(root.precision.digits().saturating_sub(10)).max(1);
    let grid: Vec<f64> = (0..points).map(|i| xmax * i as f64 / (points - 1) as f64).collect();
    let xs: Vec<BigReal> = grid.iter().map(|x| BigReal::from_f64(*x, root.precision)).collect();
    let psi = eigenfunction_profile(&p, parity, &xs, target)?;
    let residual = residual_profile(&p, parity, &root.energy, &v, &xs, target)?;
    let mut report = Report::default();
    report.saw(root);
    for ((x, psi), (_, res)) in grid.iter().zip(&psi).zip(&residual) {
        let mut r = Record::new();
        r.insert("x".into(), json!(format!("{x:.6}")));
        r.insert("psi".into(), json!(decimal(psi, target)));
        r.insert("residual".into(), json!(sci(res, 3)));
        report.push(r);
    }
    report.extra.insert(
        "pade".into(),
        json!({
            "D": root.dim, "d": root.shift, "M": m, "N": n,
            "energy": crate::output::root_text(root, ctx.print_cap()),
            "poles": p.poles, "rank_deficient": p.rank_deficient,
        }),
    );
    Ok(report)
}

pub fn rate(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let parity = ctx.parity();
    let (_, hi) = ctx.dims(11);
    let reference = ctx.flags.reference.as_deref().map(parse_real).transpose()?;
    let reach = if reference.is_some() { hi } else { hi + 8 };
    let flags = Flags {
        dmax: Some(reach),
        ..ctx.flags.clone()
    };
    let wide = Context { flags, cap: ctx.cap };
    let seq = wide.sequences(&v, parity, ctx.shift(), reach)?.remove(0);
    let reference = match reference {
        Some(r) => r,
        None => seq.last().expect("nonempty sequence").energy.clone(),
    };
    let mut report = Report::default();
    let mut gaps = Vec::new();
    for root in seq.entries.iter().filter(|r| r.dim <= hi) {
        let gap = (&root.energy - &reference.with_precision(root.precision)).abs();
        let mut r = root_record(root, parity.index(), ctx.print_cap());
        r.insert("gap".into(), json!(sci(&gap, 4)));
        report.saw(root);
        report.push(r);
        gaps.push((root.dim, gap));
    }
    let fit = fit_rate(&gaps)?;
    report.extra.insert(
        "fit".into(),
        json!({ "A": fit.a, "k": fit.k, "slope_log10": fit.slope_log10, "residual": fit.residual }),
    );
    Ok(report)
}

pub fn oracle(ctx: &Context) -> Result<Report, CliError> {
    let v = ctx.potential()?;
    let count = ctx.flags.count.unwrap_or(4).max(1);
    let opts = OracleOptions::default();
    let result = if ctx.flags.full_line {
        oracle_full_line(&v, count - 1, &opts)?
    } else {
        let parity = ctx.flags.parity.map(|_| ctx.parity());
        oracle_eigenvalues(&v, parity, count - 1, &opts)?
    };
    let p = Precision::new(30).expect("above floor");
    let mut report = Report::default();
    for (n, (e, par)) in result.eigenvalues.iter().zip(&result.parities).enumerate() {
        let mut r = Record::new();
        r.insert("n".into(), json!(n));
        r.insert("parity".into(), json!(par.index()));
        r.insert("energy".into(), json!(decimal(&BigReal::from_f64(*e, p), 10)));
        report.push(r);
    }
    report.extra.insert(
        "oracle".into(),
        json!({ "method": result.method, "box_len": result.box_len, "points": result.points, "drift": result.drift }),
    );
    Ok(report)
}
