use dashu_int::IBig;
use dashu_ratio::RBig;
use rpm_core::hankel::{det_symbolic, HankelSpec, DEFAULT_TERM_LIMIT};
use rpm_core::number::{BigReal, Precision};
use rpm_core::observables::ObservableSpec;
use rpm_core::oracle::{oracle_state, OracleOptions};
use rpm_core::potential::{parse_potential, rational_to_f64};
use rpm_core::solver::{find_root_near, fit_rate, RootSequence};
use rpm_core::{Parity, RationalPoly};
use serde_json::json;

use crate::commands::{expectation_digits, Context};
use crate::config::Flags;
use crate::output::{decimal, root_text, Record, Report};
use crate::{par_map, CliError};

fn log10_text(x: &BigReal) -> String {
    format!("{:.6}", x.abs().log10_abs())
}

fn sub(ctx: &Context, potential: &str, parity: u8, dmax: usize) -> Context {
    Context {
        flags: Flags {
            potential: Some(potential.to_string()),
            parity: Some(parity),
            dmax: Some(ctx.flags.dmax.unwrap_or(dmax)),
            digits: ctx.flags.digits,
            precision: ctx.flags.precision,
            dmin: ctx.flags.dmin,
            ..Flags::default()
        },
        cap: ctx.cap,
    }
}

fn preset_name(ctx: &Context) -> Result<&str, CliError> {
    ctx.flags.name.as_deref().ok_or_else(|| CliError::Invalid("--name is required".into()))
}

pub fn table(ctx: &Context) -> Result<Report, CliError> {
    match preset_name(ctx)? {
        "spurious" => spurious(ctx),
        "dw-e0e1" => dw_e0e1(ctx),
        other => Err(CliError::Invalid(format!("unknown table {other:?} (spurious, dw-e0e1)"))),
    }
}

pub fn figure_data(ctx: &Context) -> Result<Report, CliError> {
    match preset_name(ctx)? {
        "anal" => anal(ctx),
        "logUBLB_0" => log_bounds(ctx),
        "sequences" => sequences(ctx),
        "exval" => exval(ctx),
        "DWH20" => dw_polynomial_roots(ctx, 0),
        "DWH21" => dw_polynomial_roots(ctx, 1),
        "DWLOG" => dw_log(ctx),
        other => Err(CliError::Invalid(format!(
            "unknown figure {other:?} (anal, logUBLB_0, sequences, exval, DWH20, DWH21, DWLOG)"
        ))),
    }
}

/// Both `d = 0` sequences of the modified Pöschl–Teller well (λ = 3) that
/// start in [-10, 0]: the bound state and the companion-problem root.
fn spurious(ctx: &Context) -> Result<Report, CliError> {
    let mut c = sub(ctx, "mpt:lambda=3", 0, 8);
    c.flags.window = Some(ctx.flags.window.clone().unwrap_or_else(|| "-10,0".into()));
    c.flags.dmin = Some(ctx.flags.dmin.unwrap_or(2));
    c.flags.digits = Some(ctx.flags.digits.unwrap_or(20));
    let v = c.potential()?;
    let seqs = fastest_per_limit(c.sequences(&v, Parity::Even, 0, 8)?);
    if seqs.len() < 2 {
        return Err(CliError::NoConvergence(format!("found {} distinct limits, expected 2", seqs.len())));
    }
    let cap = c.print_cap();
    let mut report = Report::default();
    let names = ["E0_MPT", "E0_PT"];
    for (i, root) in seqs[0].entries.iter().enumerate() {
        let mut r = Record::new();
        r.insert("D".into(), json!(root.dim));
        r.insert("d".into(), json!(0));
        for (name, seq) in names.iter().zip(&seqs) {
            let other = &seq.entries[i];
            r.insert((*name).into(), json!(root_text(other, cap)));
            r.insert(format!("{name}_digits"), json!(other.certified_digits));
            report.saw(other);
        }
        report.push(r);
    }
    Ok(report)
}

/// One sequence per distinct limit, the one whose last step is smallest,
/// ordered by descending limit.
fn fastest_per_limit(seqs: Vec<RootSequence>) -> Vec<RootSequence> {
    let last_step = |s: &RootSequence| match s.entries.as_slice() {
        [.., a, b] => (&b.energy - &a.energy).abs().log10_abs(),
        _ => f64::INFINITY,
    };
    let mut kept: Vec<RootSequence> = Vec::new();
    for s in seqs {
        let limit = s.last().unwrap().energy.to_f64();
        match kept.iter_mut().find(|k| (k.last().unwrap().energy.to_f64() - limit).abs() < 1e-6 * limit.abs().max(1.0)) {
            Some(k) if last_step(&s) < last_step(k) => *k = s,
            Some(_) => {}
            None => kept.push(s),
        }
    }
    kept.sort_by(|a, b| b.last().unwrap().energy.partial_cmp(&a.last().unwrap().energy).unwrap());
    kept
}

/// Ground and first excited double-well states bracketed by the `d = 0` and
/// `d = 1` roots at the largest `D`.
fn dw_e0e1(ctx: &Context) -> Result<Report, CliError> {
    let cases: Vec<(&str, u8, usize)> = ["-1", "-5", "-10", "-15"]
        .iter()
        .flat_map(|b| [(*b, 0u8, 0usize), (*b, 0, 1), (*b, 1, 0), (*b, 1, 1)])
        .collect();
    let runs = par_map(&cases, |(beta, parity, shift)| -> Result<RootSequence, CliError> {
        let mut c = sub(ctx, &format!("dwell:beta={beta}"), *parity, 20);
        c.flags.digits = Some(ctx.flags.digits.unwrap_or(20));
        let v = c.potential()?;
        Ok(c.sequences(&v, c.parity(), *shift, 20)?.remove(0))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    let cap = ctx.flags.digits.unwrap_or(20);
    let mut report = Report::default();
    for (case, pair) in cases.chunks(2).zip(runs.chunks(2)) {
        let (lower, upper) = (pair[0].last().unwrap(), pair[1].last().unwrap());
        let mut r = Record::new();
        r.insert("beta".into(), json!(case[0].0));
        r.insert("state".into(), json!(case[0].1));
        r.insert("D".into(), json!(lower.dim));
        r.insert("lower".into(), json!(root_text(lower, cap)));
        r.insert("upper".into(), json!(root_text(upper, cap)));
        r.insert("gap".into(), json!(crate::output::sci(&(&upper.energy - &lower.energy), 3)));
        r.insert("lower_digits".into(), json!(lower.certified_digits));
        r.insert("upper_digits".into(), json!(upper.certified_digits));
        report.saw(lower);
        report.saw(upper);
        report.push(r);
    }
    Ok(report)
}

const ANAL_LAMBDAS: [&str; 13] = ["1/100", "1/50", "1/20", "1/10", "1/5", "1/2", "1", "2", "5", "10", "20", "50", "100"];

/// Roots of `H_2^0` and `H_2^1` for `x² + λx⁴` next to the oracle ground state.
fn anal(ctx: &Context) -> Result<Report, CliError> {
    let opts = ctx.solve_options();
    let rows = par_map(&ANAL_LAMBDAS, |lam| -> Result<Record, CliError> {
        let v = parse_potential(&format!("x2x4:lambda={lam}"), 2)?;
        let accurate = oracle_state(&v, 0, &OracleOptions::default())?;
        let seed = BigReal::from_f64(accurate, Precision::new(40).expect("above floor"));
        let mut r = Record::new();
        r.insert("lambda".into(), json!(lam));
        for (shift, name) in [(0, "lower"), (1, "upper")] {
            let root = find_root_near(&v, &HankelSpec::new(2, shift, Parity::Even)?, &seed, &opts)?;
            r.insert(name.into(), json!(root_text(&root, 16)));
        }
        r.insert("accurate".into(), json!(format!("{accurate:.12}")));
        Ok(r)
    });
    Ok(Report {
        results: rows.into_iter().collect::<Result<_, _>>()?,
        ..Report::default()
    })
}

fn tracked_pair(ctx: &Context, potential: &str, parity: u8, dmax: usize) -> Result<(RootSequence, RootSequence), CliError> {
    let c = sub(ctx, potential, parity, dmax);
    let v = c.potential()?;
    let mut runs = par_map(&[0usize, 1], |&d| c.sequences(&v, c.parity(), d, dmax)).into_iter();
    let lower = runs.next().unwrap()?.remove(0);
    let upper = runs.next().unwrap()?.remove(0);
    Ok((lower, upper))
}

/// Quartic ground state: lower and upper bounds and their gap against `D`.
fn log_bounds(ctx: &Context) -> Result<Report, CliError> {
    let (lower, upper) = tracked_pair(ctx, "quartic", 0, 20)?;
    let mut report = Report::default();
    for lo in &lower.entries {
        let Some(up) = upper.entries.iter().find(|u| u.dim == lo.dim) else {
            continue;
        };
        let mut r = Record::new();
        r.insert("D".into(), json!(lo.dim));
        r.insert("lower".into(), json!(root_text(lo, 30)));
        r.insert("upper".into(), json!(root_text(up, 30)));
        r.insert("log10_gap".into(), json!(log10_text(&(&up.energy - &lo.energy))));
        report.saw(lo);
        report.saw(up);
        report.push(r);
    }
    Ok(report)
}

/// `log10 |E^[D,0] - E|` for the two lowest even quartic states, the limit
/// taken from the same sequence eight dimensions further on.
fn sequences(ctx: &Context) -> Result<Report, CliError> {
    let dmax = ctx.flags.dmax.unwrap_or(14);
    let runs = par_map(&[0usize, 1], |&state| -> Result<RootSequence, CliError> {
        let mut c = sub(ctx, "quartic", 0, dmax);
        c.flags.dmax = Some(dmax + 8);
        c.flags.state = Some(state);
        let v = c.potential()?;
        Ok(c.sequences(&v, Parity::Even, 0, dmax + 8)?.remove(0))
    });
    let mut report = Report::default();
    for (state, seq) in runs.into_iter().enumerate() {
        let seq = seq?;
        let limit = seq.last().unwrap().energy.clone();
        for root in seq.entries.iter().filter(|r| r.dim <= dmax) {
            let mut r = Record::new();
            r.insert("n".into(), json!(2 * state));
            r.insert("D".into(), json!(root.dim));
            r.insert("root".into(), json!(root_text(root, 30)));
            r.insert("log10_error".into(), json!(log10_text(&(&root.energy - &limit.with_precision(root.precision)))));
            report.saw(root);
            report.push(r);
        }
    }
    Ok(report)
}

/// Quartic `⟨x²⟩` from the `d = 0` and `d = 1` roots against `D`.
fn exval(ctx: &Context) -> Result<Report, CliError> {
    let (lower, upper) = tracked_pair(ctx, "quartic", 0, 14)?;
    let v = parse_potential("quartic", 2)?;
    let a = ObservableSpec::power(1);
    let pairs: Vec<_> = lower
        .entries
        .iter()
        .filter_map(|lo| upper.entries.iter().find(|u| u.dim == lo.dim).map(|up| (lo, up)))
        .collect();
    let rows = par_map(&pairs, |(lo, up)| -> Result<Record, CliError> {
        let mut values = Vec::new();
        for root in [lo, up] {
            let spec = HankelSpec::new(root.dim, root.shift, Parity::Even)?;
            values.push(expectation_digits(&v, &a, &spec, root)?);
        }
        let mut r = Record::new();
        r.insert("D".into(), json!(lo.dim));
        r.insert("x2_lower_root".into(), json!(decimal(&values[0].0, values[0].1.min(30))));
        r.insert("x2_upper_root".into(), json!(decimal(&values[1].0, values[1].1.min(30))));
        r.insert("log10_gap".into(), json!(log10_text(&(&values[1].0 - &values[0].0))));
        Ok(r)
    });
    Ok(Report {
        results: rows.into_iter().collect::<Result<_, _>>()?,
        precision: lower.entries.iter().chain(&upper.entries).map(|r| r.precision.digits()).max().unwrap_or(0),
        ..Report::default()
    })
}

/// Real zeros of a polynomial in `E` inside `[lo, hi]` by sign changes on
/// a grid and bisection.
fn real_zeros(poly: &RationalPoly, lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    let p = Precision::new(40).expect("above floor");
    let at = |e: f64| poly.eval_real(&BigReal::from_f64(e, p), None, p);
    let mut zeros = Vec::new();
    let mut prev_e = lo;
    let mut prev = at(lo);
    for i in 1..=steps {
        let e = lo + (hi - lo) * i as f64 / steps as f64;
        let cur = at(e);
        if cur.is_zero() {
            zeros.push(e);
        } else if !prev.is_zero() && prev.is_negative() != cur.is_negative() {
            let (mut a, mut b) = (prev_e, e);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if at(m).is_negative() == prev.is_negative() {
                    a = m;
                } else {
                    b = m;
                }
            }
            zeros.push(0.5 * (a + b));
        }
        prev_e = e;
        prev = cur;
    }
    zeros
}

/// Real roots `E(β)` of the exact `H_2^d(E, β)` for the double well,
/// alongside the oracle `E_0(β)` and `E_1(β)`.
fn dw_polynomial_roots(ctx: &Context, shift: usize) -> Result<Report, CliError> {
    let v = parse_potential("dwell:beta=B", 2)?;
    let det = det_symbolic(&v, &HankelSpec::new(2, shift, Parity::Even)?, None, DEFAULT_TERM_LIMIT)?;
    let steps = ctx.flags.points.unwrap_or(81).max(2);
    let betas: Vec<RBig> = (0..steps)
        .map(|i| RBig::from_parts(IBig::from(-60 + (80 * i / (steps - 1)) as i64), 4u8.into()))
        .collect();
    let rows = par_map(&betas, |beta| -> Result<Vec<Record>, CliError> {
        let b = rational_to_f64(beta);
        let row = |kind: &str, e: f64| {
            let mut r = Record::new();
            r.insert("beta".into(), json!(format!("{b}")));
            r.insert("kind".into(), json!(kind));
            r.insert("energy".into(), json!(format!("{e:.12}")));
            r
        };
        let poly = det.substitute_param(beta);
        let depth = if b < 0.0 { -b * b / 4.0 } else { 0.0 };
        let mut out: Vec<Record> = real_zeros(&poly, depth - 10.0, 30.0, 4000).into_iter().map(|e| row("root", e)).collect();
        let well = parse_potential(&format!("dwell:beta={beta}"), 2)?;
        for n in 0..2 {
            out.push(row(&format!("E{n}"), oracle_state(&well, n, &OracleOptions::default())?));
        }
        Ok(out)
    });
    let mut report = Report::default();
    for r in rows {
        report.results.extend(r?);
    }
    Ok(report)
}

/// `log10 |E^[D,1] - E^[D,0]|` for the double-well ground state with a
/// straight-line fit per β.
fn dw_log(ctx: &Context) -> Result<Report, CliError> {
    let betas = ["-1", "-5", "-10", "-15"];
    let pairs = par_map(&betas, |b| tracked_pair(ctx, &format!("dwell:beta={b}"), 0, 20));
    let mut report = Report::default();
    for (beta, pair) in betas.iter().zip(pairs) {
        let (lower, upper) = pair?;
        let gaps: Vec<(usize, BigReal)> = lower
            .entries
            .iter()
            .filter_map(|lo| {
                let up = upper.entries.iter().find(|u| u.dim == lo.dim)?;
                report.saw(lo);
                report.saw(up);
                Some((lo.dim, &up.energy - &lo.energy))
            })
            .collect();
        let positive: Vec<_> = gaps.iter().filter(|(_, g)| !g.is_negative() && !g.is_zero()).cloned().collect();
        let fit = fit_rate(&positive).ok();
        for (dim, gap) in &gaps {
            let mut r = Record::new();
            r.insert("beta".into(), json!(beta));
            r.insert("D".into(), json!(dim));
            r.insert("log10_gap".into(), json!(log10_text(gap)));
            let line = fit
                .as_ref()
                .map(|f| format!("{:.6}", f.a.log10() + f.slope_log10 * *dim as f64))
                .unwrap_or_default();
            r.insert("fit_log10".into(), json!(line));
            report.push(r);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_zeros() {
        // (E - 1)(E + 2)(E - 3)
        let poly = RationalPoly::from_energy_coeffs(vec![6.into(), (-5).into(), (-2).into(), 1.into()]);
        let z = real_zeros(&poly, -5.0, 5.0, 1000);
        assert_eq!(z.len(), 3);
        for (got, want) in z.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }
}
