//! Roots of `H_D^d(E)`, their continuation in `D`, bound pairs and
//! convergence-rate fits.
//!
//! Every energy crossing this API is on the original (unshifted) scale; the
//! constant term of the potential is removed and added back internally.

use std::ops::RangeInclusive;

use crate::error::{Result, RpmError};
use crate::hankel::{agreeing_digits, det_dual, det_numeric, HankelSpec, GUARD_DIGITS};
use crate::number::{BigReal, Precision};
use crate::potential::{shift_constant, PotentialSpec};

/// Default ceiling for precision escalation, in decimal digits.
pub const DEFAULT_PRECISION_CAP: u32 = 600;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Significant digits the root should be certified to.
    pub target_digits: u32,
    pub max_iter: usize,
    /// Half-width of the interval around the guess searched by the
    /// bisection fallback and accepted during continuation.
    pub window: f64,
    /// Grid size for sign-change scans.
    pub scan_points: usize,
    /// Working precision; `None` selects `max(40, 4D + 20)`.
    pub precision: Option<Precision>,
    pub precision_cap: u32,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            target_digits: 24,
            max_iter: 200,
            window: 1.0,
            scan_points: 200,
            precision: None,
            precision_cap: DEFAULT_PRECISION_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub dim: usize,
    pub shift: usize,
    pub energy: BigReal,
    pub certified_digits: u32,
    /// `|H(root)|` at the working precision.
    pub residual: BigReal,
    /// `max |H(guess ± 0.1)|`, the magnitude the residual is measured against.
    pub scale: BigReal,
    pub precision: Precision,
    pub iterations: usize,
}

/// Make sure a truncated series reaches coefficient `n`.
pub fn ensure_order(v: &PotentialSpec, n: usize) -> Result<PotentialSpec> {
    if v.exact_tail || v.jmax() >= n {
        Ok(v.clone())
    } else {
        v.with_order(n)
    }
}

fn abs_f64(x: &BigReal) -> f64 {
    x.to_f64().abs()
}

/// Significant digits on which two roots agree.
fn root_digits(a: &BigReal, b: &BigReal, cap: u32) -> u32 {
    if b.is_zero() {
        let diff = (a - b).abs();
        if diff.is_zero() {
            return cap;
        }
        return ((-diff.log10_abs()).floor().max(0.0) as u32).min(cap);
    }
    agreeing_digits(a, b, cap)
}

struct Newton<'a> {
    v: &'a PotentialSpec,
    spec: &'a HankelSpec,
    prec: Precision,
    opts: &'a SolveOptions,
}

enum Outcome {
    Root(BigReal, usize),
    Failed(String),
}

impl Newton<'_> {
    fn eval(&self, e: &BigReal) -> Result<(BigReal, BigReal)> {
        let h = det_dual(self.v, e, None, self.spec, self.prec)?;
        Ok((h.value, h.d_energy))
    }

    /// Newton iteration from `start`, staying within `window` of `center`.
    fn run(&self, start: &BigReal, center: &BigReal, window: f64) -> Result<Outcome> {
        let p = self.prec;
        let tol_exp = -(self.opts.target_digits as i64 + 4);
        let floor_exp = -(p.digits() as i64) + 5;
        let mut e = start.with_precision(p);
        let (mut h, mut dh) = self.eval(&e)?;
        let scale_here = h.abs();
        let mut multiplicity = 1u32;
        let mut steps: Vec<f64> = Vec::new();
        let mut stalled = 0;
        let mut last_sign: Option<bool> = None;
        for iter in 0..self.opts.max_iter {
            if h.is_zero() {
                return Ok(Outcome::Root(e, iter));
            }
            if dh.is_zero() {
                return Ok(Outcome::Failed("vanishing derivative".into()));
            }
            let newton = &h / &dh;
            let mut step = &newton * &BigReal::from_int(multiplicity as i64, p);
            let mut trial = &e - &step;
            let (mut h_t, mut dh_t) = self.eval(&trial)?;
            let mut damping = 0;
            while h_t.abs() > &h.abs() * &BigReal::from_int(4, p) && damping < 8 {
                step = &step / &BigReal::from_int(2, p);
                trial = &e - &step;
                (h_t, dh_t) = self.eval(&trial)?;
                damping += 1;
            }
            let size = step.abs();
            let mag = e.abs().max(&BigReal::one(p)).clone();
            e = trial;
            h = h_t;
            dh = dh_t;
            if abs_f64(&(&e - center)) > window {
                return Ok(Outcome::Failed("left the search window".into()));
            }
            let rel = size.log10_abs() - mag.log10_abs();
            if rel < tol_exp as f64 {
                // one more step is free accuracy at quadratic convergence
                if !h.is_zero() && !dh.is_zero() {
                    let last = &(&h / &dh) * &BigReal::from_int(multiplicity as i64, p);
                    let (h2, _) = self.eval(&(&e - &last))?;
                    if h2.abs() <= h.abs() {
                        e = &e - &last;
                    }
                }
                return Ok(Outcome::Root(e, iter + 1));
            }
            if h.abs().log10_abs() - scale_here.log10_abs() < floor_exp as f64 {
                return Ok(Outcome::Root(e, iter + 1));
            }

            let size = size.log10_abs();
            if let Some(&prev) = steps.last() {
                if size >= prev - 0.05 && rel < -(self.opts.target_digits as f64) / 2.0 {
                    stalled += 1;
                    if stalled >= 3 {
                        return Ok(Outcome::Root(e, iter + 1));
                    }
                } else {
                    stalled = 0;
                }
            }
            let sign = step.is_negative();
            if multiplicity > 1 && last_sign.is_some_and(|s| s != sign) {
                // overshoot: the root is simple at this resolution
                multiplicity = 1;
                steps.clear();
            } else {
                steps.push(size);
                multiplicity = estimate_multiplicity(&steps, multiplicity);
            }
            last_sign = Some(sign);
        }
        Ok(Outcome::Failed(format!("{} iterations", self.opts.max_iter)))
    }

    /// Bracketing fallback: scan the window for sign changes and bisect the
    /// bracket nearest to the guess.
    fn bisect(&self, guess: &BigReal, window: f64) -> Result<Option<BigReal>> {
        let p = self.prec;
        let n = 40;
        let g = guess.to_f64();
        let grid: Vec<BigReal> = (0..=n)
            .map(|i| BigReal::from_f64(g - window + 2.0 * window * i as f64 / n as f64, p))
            .collect();
        let values = grid
            .iter()
            .map(|e| det_numeric(self.v, e, self.spec, p))
            .collect::<Result<Vec<_>>>()?;
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n {
            if values[i].is_zero() {
                return Ok(Some(grid[i].clone()));
            }
            if values[i].is_negative() != values[i + 1].is_negative() {
                let mid = (grid[i].to_f64() + grid[i + 1].to_f64()) / 2.0;
                let dist = (mid - g).abs();
                if best.is_none_or(|(d, _)| dist < d) {
                    best = Some((dist, i));
                }
            }
        }
        let Some((_, i)) = best else { return Ok(None) };
        let (mut lo, mut hi) = (grid[i].clone(), grid[i + 1].clone());
        let lo_negative = values[i].is_negative();
        let two = BigReal::from_int(2, p);
        for _ in 0..60 {
            let mid = &(&lo + &hi) / &two;
            let h = det_numeric(self.v, &mid, self.spec, p)?;
            if h.is_zero() {
                return Ok(Some(mid));
            }
            if h.is_negative() == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(Some(&(&lo + &hi) / &two))
    }

    fn solve(&self, guess: &BigReal, window: f64) -> Result<(BigReal, usize)> {
        match self.run(guess, guess, window)? {
            Outcome::Root(e, it) => Ok((e, it)),
            Outcome::Failed(reason) => match self.bisect(guess, window)? {
                Some(bracketed) => match self.run(&bracketed, guess, window)? {
                    Outcome::Root(e, it) => Ok((e, it + 60)),
                    Outcome::Failed(_) => Ok((bracketed, 60)),
                },
                None => Err(RpmError::NoConvergence(reason)),
            },
        }
    }
}

/// Geometric step decay with ratio `r` signals a root of multiplicity
/// `1/(1-r)`; once detected the Newton step is scaled by it.
fn estimate_multiplicity(steps: &[f64], current: u32) -> u32 {
    if steps.len() < 4 || current > 1 {
        return current;
    }
    let n = steps.len();
    let r1 = steps[n - 1] - steps[n - 2];
    let r2 = steps[n - 2] - steps[n - 3];
    let r3 = steps[n - 3] - steps[n - 4];
    if (r1 - r2).abs() > 0.02 || (r2 - r3).abs() > 0.02 {
        return current;
    }
    let ratio = 10f64.powf(r1);
    if !(0.4..0.97).contains(&ratio) {
        return current;
    }
    (1.0 / (1.0 - ratio)).round().max(1.0) as u32
}

/// Root of `H_D^d` nearest to `guess`, with precision escalation until the
/// root is stable to `opts.target_digits` under a `+20`-digit re-solve.
pub fn find_root_near(v: &PotentialSpec, spec: &HankelSpec, guess: &BigReal, opts: &SolveOptions) -> Result<Root> {
    let v = ensure_order(v, spec.max_index())?;
    let (shifted, shift) = shift_constant(&v);
    let mut prec = opts.precision.unwrap_or_else(|| spec.default_precision());
    if prec.digits() > opts.precision_cap {
        prec = Precision::new(opts.precision_cap)?;
    }
    let shift_at = |p: Precision| BigReal::from_rational(&shift, p);
    let mut start = guess.with_precision(prec) - shift_at(prec);
    let mut total = 0;
    loop {
        let newton = Newton {
            v: &shifted,
            spec,
            prec,
            opts,
        };
        let (root, iters) = newton.solve(&start, opts.window)?;
        total += iters;

        let hi = prec.plus(GUARD_DIGITS);
        let fine = Newton {
            v: &shifted,
            spec,
            prec: hi,
            opts,
        };
        let polished = match fine.run(&root, &root, opts.window)? {
            Outcome::Root(e, it) => {
                total += it;
                e
            }
            Outcome::Failed(_) => root.with_precision(hi),
        };
        let digits = root_digits(
            &(&root.with_precision(hi) + &shift_at(hi)),
            &(&polished + &shift_at(hi)),
            prec.digits(),
        );
        let at_cap = prec.digits() >= opts.precision_cap;
        if digits >= opts.target_digits || at_cap {
            let residual = det_numeric(&shifted, &polished, spec, prec)?.abs();
            let offset = BigReal::parse("0.1", prec)?;
            let s1 = det_numeric(&shifted, &(&start + &offset), spec, prec)?.abs();
            let s2 = det_numeric(&shifted, &(&start - &offset), spec, prec)?.abs();
            return Ok(Root {
                dim: spec.dim,
                shift: spec.shift,
                energy: &polished + &shift_at(hi),
                certified_digits: digits,
                residual,
                scale: s1.max(&s2).clone(),
                precision: prec,
                iterations: total,
            });
        }
        let next = prec.escalate().digits().min(opts.precision_cap);
        prec = Precision::new(next)?;
        start = polished.with_precision(prec);
    }
}

/// All sign-change roots of `H_D^d` in `[lo, hi]`, each refined with
/// [`find_root_near`]; sorted ascending.
pub fn scan_roots(
    v: &PotentialSpec,
    spec: &HankelSpec,
    lo: &BigReal,
    hi: &BigReal,
    opts: &SolveOptions,
) -> Result<Vec<Root>> {
    let v = ensure_order(v, spec.max_index())?;
    let (shifted, shift) = shift_constant(&v);
    let prec = opts.precision.unwrap_or_else(|| spec.default_precision());
    let shift = BigReal::from_rational(&shift, prec);
    let n = opts.scan_points.max(2);
    let lo = lo.with_precision(prec);
    let step = (&hi.with_precision(prec) - &lo) / BigReal::from_int(n as i64, prec);
    let grid: Vec<BigReal> = (0..=n)
        .map(|i| &lo + &(&step * &BigReal::from_int(i as i64, prec)))
        .collect();
    let values = grid
        .iter()
        .map(|e| det_numeric(&shifted, &(e - &shift), spec, prec))
        .collect::<Result<Vec<_>>>()?;
    let width = abs_f64(&step);
    let mut roots: Vec<Root> = Vec::new();
    for i in 0..n {
        let brackets = values[i].is_zero() || values[i].is_negative() != values[i + 1].is_negative();
        if !brackets || (values[i + 1].is_zero() && i + 1 < n) {
            continue;
        }
        let local = SolveOptions {
            window: width,
            ..opts.clone()
        };
        let guess = &(&grid[i] + &grid[i + 1]) / &BigReal::from_int(2, prec);
        let root = find_root_near(&v, spec, &guess, &local)?;
        if !roots.iter().any(|r| abs_f64(&(&r.energy - &root.energy)) < width / 4.0) {
            roots.push(root);
        }
    }
    roots.sort_by(|a, b| a.energy.partial_cmp(&b.energy).expect("finite roots"));
    Ok(roots)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub a: f64,
    pub k: f64,
    /// Slope of `log10(gap)` against `D`.
    pub slope_log10: f64,
    /// RMS deviation of `ln(gap)` from the fitted line.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSequence {
    pub shift: usize,
    pub parity: crate::Parity,
    pub label: String,
    pub entries: Vec<Root>,
    pub converged: Option<BigReal>,
    pub rate: Option<RateFit>,
}

impl RootSequence {
    pub fn last(&self) -> Option<&Root> {
        self.entries.last()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Seed {
    Energy(BigReal),
    /// Scan `[lo, hi]` at the smallest `D`; each sign change starts a sequence.
    Window(f64, f64),
}

/// Continue a root across `dims`, each step seeded by the previous root and
/// resolved to the closest root of the new determinant.
pub fn track_from(
    v: &PotentialSpec,
    parity: crate::Parity,
    shift: usize,
    dims: RangeInclusive<usize>,
    seed: &BigReal,
    opts: &SolveOptions,
) -> Result<RootSequence> {
    let mut entries: Vec<Root> = Vec::new();
    let mut prev = seed.clone();
    for dim in dims {
        let spec = HankelSpec::new(dim, shift, parity)?;
        let root = match find_root_near(v, &spec, &prev, opts) {
            Ok(r) => r,
            Err(e) => {
                return Err(RpmError::LostContinuation {
                    dim,
                    reason: e.to_string(),
                })
            }
        };
        let root = closest_root(v, &spec, &prev, root, opts)?;
        let dist = abs_f64(&(&root.energy - &prev));
        if !entries.is_empty() && dist > opts.window {
            return Err(RpmError::LostContinuation {
                dim,
                reason: format!("nearest root is {dist:.3e} away"),
            });
        }
        prev = root.energy.clone();
        entries.push(root);
    }
    let converged = match entries.as_slice() {
        [.., a, b] if root_digits(&a.energy, &b.energy, 1000) >= opts.target_digits => Some(b.energy.clone()),
        _ => None,
    };
    Ok(RootSequence {
        shift,
        parity,
        label: String::new(),
        entries,
        converged,
        rate: None,
    })
}

/// [`track_from`], dropping leading dimensions until the continuation holds.
/// Deep wells have no root near the eigenvalue at small `D`.
pub fn track_from_first(
    v: &PotentialSpec,
    parity: crate::Parity,
    shift: usize,
    dims: RangeInclusive<usize>,
    seed: &BigReal,
    opts: &SolveOptions,
) -> Result<RootSequence> {
    let (mut first, last) = dims.into_inner();
    loop {
        match track_from(v, parity, shift, first..=last, seed, opts) {
            Err(RpmError::LostContinuation { dim, .. }) if dim < last => {
                first = if dim == first { dim + 1 } else { dim };
            }
            other => return other,
        }
    }
}

/// Replace `found` by a closer root of the same determinant if a sign
/// change lies nearer to `prev`; equidistant roots resolve to the lower one.
fn closest_root(v: &PotentialSpec, spec: &HankelSpec, prev: &BigReal, found: Root, opts: &SolveOptions) -> Result<Root> {
    let dist = abs_f64(&(&found.energy - prev));
    if dist == 0.0 {
        return Ok(found);
    }
    let scan = SolveOptions {
        scan_points: 40,
        ..opts.clone()
    };
    let reach = BigReal::from_f64(dist, prev.precision());
    let candidates = scan_roots(v, spec, &(prev - &reach), &(prev + &reach), &scan)?;
    let mut best = found;
    let mut best_key = (dist, best.energy.to_f64());
    for c in candidates {
        let key = (abs_f64(&(&c.energy - prev)), c.energy.to_f64());
        let closer = key.0 < best_key.0 * (1.0 - 1e-12);
        let tie_lower = (key.0 - best_key.0).abs() <= best_key.0 * 1e-12 && key.1 < best_key.1;
        if closer || tie_lower {
            best_key = key;
            best = c;
        }
    }
    Ok(best)
}

pub fn track_sequence(
    v: &PotentialSpec,
    parity: crate::Parity,
    shift: usize,
    dims: RangeInclusive<usize>,
    seed: &Seed,
    opts: &SolveOptions,
) -> Result<Vec<RootSequence>> {
    match seed {
        Seed::Energy(e) => Ok(vec![track_from(v, parity, shift, dims, e, opts)?]),
        Seed::Window(lo, hi) => {
            let spec = HankelSpec::new(*dims.start(), shift, parity)?;
            let p = spec.default_precision();
            let starts = scan_roots(v, &spec, &BigReal::from_f64(*lo, p), &BigReal::from_f64(*hi, p), opts)?;
            starts
                .iter()
                .map(|r| track_from(v, parity, shift, dims.clone(), &r.energy, opts))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsPair {
    pub dim: usize,
    pub label: String,
    pub lower: Root,
    pub upper: Root,
    pub gap: BigReal,
}

/// Pair the `d = 0` (lower) and `d = 1` (upper) roots at one `D`.
pub fn bounds_pair(
    v: &PotentialSpec,
    parity: crate::Parity,
    label: &str,
    dim: usize,
    seeds: (&BigReal, &BigReal),
    opts: &SolveOptions,
) -> Result<BoundsPair> {
    let lower = find_root_near(v, &HankelSpec::new(dim, 0, parity)?, seeds.0, opts)?;
    let upper = find_root_near(v, &HankelSpec::new(dim, 1, parity)?, seeds.1, opts)?;
    Ok(BoundsPair {
        dim,
        label: label.to_string(),
        gap: &upper.energy - &lower.energy,
        lower,
        upper,
    })
}

/// Bound pairs for every `D` in `dims`, continuing both sequences from `seed`.
pub fn track_bounds(
    v: &PotentialSpec,
    parity: crate::Parity,
    label: &str,
    dims: RangeInclusive<usize>,
    seed: &BigReal,
    opts: &SolveOptions,
) -> Result<Vec<BoundsPair>> {
    let lower = track_from(v, parity, 0, dims.clone(), seed, opts)?;
    let upper = track_from(v, parity, 1, dims, seed, opts)?;
    Ok(lower
        .entries
        .into_iter()
        .zip(upper.entries)
        .map(|(lower, upper)| BoundsPair {
            dim: lower.dim,
            label: label.to_string(),
            gap: &upper.energy - &lower.energy,
            lower,
            upper,
        })
        .collect())
}

/// Least-squares fit of `ln(gap) = ln A - k D`.
pub fn fit_rate(gaps: &[(usize, BigReal)]) -> Result<RateFit> {
    let mut points = Vec::with_capacity(gaps.len());
    for (dim, gap) in gaps {
        if gap.is_negative() || gap.is_zero() {
            return Err(RpmError::NonpositiveGap(*dim));
        }
        points.push((*dim as f64, gap.log10_abs() * std::f64::consts::LN_10));
    }
    if points.len() < 3 {
        return Err(RpmError::InsufficientRateData(points.len()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        a: intercept.exp(),
        k: -slope,
        slope_log10: slope / std::f64::consts::LN_10,
        residual,
    })
}
