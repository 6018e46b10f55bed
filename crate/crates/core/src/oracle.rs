//! Independent double-precision eigenvalue solver.
//!
//! Second-order finite differences on a box, Sturm-sequence bisection for
//! individual eigenvalues and Richardson extrapolation over three grid
//! spacings. Nothing here touches the series or determinant machinery.

use crate::error::{Result, RpmError};
use crate::potential::PotentialSpec;
use crate::Parity;

/// Relative drift tolerated between two resolutions.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOptions {
    /// Grid points on the coarsest of the three extrapolated grids.
    pub points: usize,
    /// Fixed half-width of the box; `None` sizes it from the turning point.
    pub box_len: Option<f64>,
    /// WKB decay exponent required between the turning point and the wall.
    pub decay: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            points: 1200,
            box_len: None,
            decay: 18.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub eigenvalues: Vec<f64>,
    pub parities: Vec<Parity>,
    pub method: String,
    pub box_len: f64,
    pub points: usize,
    /// Largest relative change between the two resolutions.
    pub drift: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Boundary {
    Half(Parity),
    Full,
}

/// Tridiagonal `-d²/dx² + V` on one grid.
struct Grid {
    diag: Vec<f64>,
    off: f64,
}

impl Grid {
    fn build(v: &dyn Fn(f64) -> f64, boundary: Boundary, len: f64, n: usize) -> Grid {
        let (h, xs): (f64, Vec<f64>) = match boundary {
            Boundary::Half(_) => {
                let h = len / (n as f64 + 0.5);
                (h, (0..n).map(|i| (i as f64 + 0.5) * h).collect())
            }
            Boundary::Full => {
                let h = 2.0 * len / (n + 1) as f64;
                (h, (1..=n).map(|i| -len + i as f64 * h).collect())
            }
        };
        let inv = 1.0 / (h * h);
        let mut diag: Vec<f64> = xs.iter().map(|&x| 2.0 * inv + v(x)).collect();
        // mirror ghost point across the origin
        match boundary {
            Boundary::Half(Parity::Even) => diag[0] -= inv,
            Boundary::Half(Parity::Odd) => diag[0] += inv,
            Boundary::Full => {}
        }
        Grid { diag, off: -inv }
    }

    /// Number of eigenvalues below `lambda`.
    fn count_below(&self, lambda: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - lambda } else { d - lambda - off2 / q };
            if q == 0.0 {
                q = f64::EPSILON * (d.abs() + lambda.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |a, &d| a.min(d - r));
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |a, &d| a.max(d + r));
        (lo, hi)
    }

    /// The `k`-th eigenvalue (0-based) by bisection.
    fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        while hi - lo > 1e-14 * (1.0 + lo.abs().max(hi.abs())) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Lowest `count` eigenvalues from grids with `n`, `2n`, `4n` points,
/// Richardson-extrapolated in `h²`.
fn extrapolated(v: &dyn Fn(f64) -> f64, boundary: Boundary, len: f64, n: usize, count: usize) -> Vec<f64> {
    let levels: Vec<Vec<f64>> = [n, 2 * n, 4 * n]
        .iter()
        .map(|&m| {
            let grid = Grid::build(v, boundary, len, m);
            (0..count).map(|k| grid.eigenvalue(k)).collect()
        })
        .collect();
    (0..count)
        .map(|k| {
            let (e1, e2, e4) = (levels[0][k], levels[1][k], levels[2][k]);
            let r1 = (4.0 * e2 - e1) / 3.0;
            let r2 = (4.0 * e4 - e2) / 3.0;
            (16.0 * r2 - r1) / 15.0
        })
        .collect()
}

/// Outermost point needed so the eigenfunction at energy `e` has decayed by
/// `exp(-decay)` past the turning point.
fn box_for(v: &dyn Fn(f64) -> f64, e: f64, decay: f64) -> Result<f64> {
    let dx = 0.005;
    let mut x = 0.0;
    let mut turning = 0.0;
    while x < 1e3 {
        if v(x) < e {
            turning = x;
        }
        if x > turning + 1.0 && v(x) > e {
            break;
        }
        x += dx;
    }
    let mut action = 0.0;
    x = turning;
    while action < decay {
        let gap = v(x) - e;
        if gap > 0.0 {
            action += gap.sqrt() * dx;
        }
        x += dx;
        if x > 1e3 {
            return Err(RpmError::OracleResolution(format!(
                "energy {e} is not below the potential at large x"
            )));
        }
    }
    Ok(x)
}

fn solve(v: &PotentialSpec, boundary: Boundary, count: usize, opts: &OracleOptions) -> Result<(Vec<f64>, f64, f64)> {
    if let Some(name) = &v.symbol {
        return Err(RpmError::UnboundSymbol(name.clone()));
    }
    let f = |x: f64| v.eval_f64(x);
    let n = opts.points.max(50);
    let mut len = match opts.box_len {
        Some(l) => l,
        None => 4.0,
    };
    let mut values = extrapolated(&f, boundary, len, n, count);
    if opts.box_len.is_none() {
        for _ in 0..8 {
            let top = *values.last().expect("count > 0");
            let needed = box_for(&f, top, opts.decay)?;
            if needed <= len {
                break;
            }
            len = needed * 1.1;
            values = extrapolated(&f, boundary, len, n, count);
        }
    }
    let fine = extrapolated(&f, boundary, len, 2 * n, count);
    let drift = values
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    if drift > DRIFT_TOLERANCE {
        return Err(RpmError::OracleResolution(format!(
            "eigenvalues drift by {drift:.2e} between resolutions"
        )));
    }
    Ok((fine, len, drift))
}

const METHOD: &str = "finite differences, Sturm bisection, Richardson h/2 h/4";

/// Lowest `k_max + 1` eigenvalues, optionally restricted to one parity.
pub fn oracle_eigenvalues(
    v: &PotentialSpec,
    parity: Option<Parity>,
    k_max: usize,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let count = k_max + 1;
    let per_parity = |p: Parity| solve(v, Boundary::Half(p), count, opts);
    let (eigenvalues, parities, len, drift) = match parity {
        Some(p) => {
            let (e, len, drift) = per_parity(p)?;
            (e, vec![p; count], len, drift)
        }
        None => {
            let (even, l1, d1) = per_parity(Parity::Even)?;
            let (odd, l2, d2) = per_parity(Parity::Odd)?;
            let mut all: Vec<(f64, Parity)> = even
                .into_iter()
                .map(|e| (e, Parity::Even))
                .chain(odd.into_iter().map(|e| (e, Parity::Odd)))
                .collect();
            all.sort_by(|a, b| a.0.total_cmp(&b.0));
            all.truncate(count);
            let (e, p) = all.into_iter().unzip();
            (e, p, l1.max(l2), d1.max(d2))
        }
    };
    Ok(OracleResult {
        eigenvalues,
        parities,
        method: METHOD.to_string(),
        box_len: len,
        points: 2 * opts.points,
        drift,
    })
}

/// Lowest `k_max + 1` eigenvalues on the symmetric box `[-L, L]` with no
/// parity reduction.
pub fn oracle_full_line(v: &PotentialSpec, k_max: usize, opts: &OracleOptions) -> Result<OracleResult> {
    let full = OracleOptions {
        points: 2 * opts.points,
        ..opts.clone()
    };
    let (eigenvalues, len, drift) = solve(v, Boundary::Full, k_max + 1, &full)?;
    let parities = (0..=k_max)
        .map(|k| if k % 2 == 0 { Parity::Even } else { Parity::Odd })
        .collect();
    Ok(OracleResult {
        eigenvalues,
        parities,
        method: format!("{METHOD}, full line"),
        box_len: len,
        points: 2 * full.points,
        drift,
    })
}

/// Oracle estimate of the `n`-th state (`n` counts both parities).
pub fn oracle_state(v: &PotentialSpec, n: usize, opts: &OracleOptions) -> Result<f64> {
    let parity = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
    let r = oracle_eigenvalues(v, Some(parity), n / 2, opts)?;
    Ok(r.eigenvalues[n / 2])
}
