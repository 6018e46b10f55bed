//! Expectation values of even polynomial observables from the slope of the
//! energy under the perturbation `V → V + β A`.

use dashu_ratio::RBig;

use crate::error::{Result, RpmError};
use crate::hankel::{det_dual, HankelSpec};
use crate::number::{BigReal, Precision};
use crate::potential::{shift_constant, PotentialSpec};
use crate::solver::{ensure_order, find_root_near, Root, SolveOptions};

/// Name of the internal perturbation parameter.
pub const PERTURBATION: &str = "__beta";

/// `A(x) = Σ_j A_j x^{2j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservableSpec {
    coeffs: Vec<RBig>,
}

impl ObservableSpec {
    pub fn new(coeffs: Vec<RBig>) -> Result<Self> {
        if coeffs.iter().all(|c| *c == RBig::ZERO) {
            return Err(RpmError::EmptyObservable);
        }
        Ok(ObservableSpec { coeffs })
    }

    /// `x^{2k}`.
    pub fn power(k: usize) -> Self {
        let mut coeffs = vec![RBig::ZERO; k + 1];
        coeffs[k] = RBig::ONE;
        ObservableSpec { coeffs }
    }

    pub fn coeffs(&self) -> &[RBig] {
        &self.coeffs
    }

    pub fn constant(&self) -> &RBig {
        &self.coeffs[0]
    }

    /// `V + β A` with `β` registered as a linear parameter.
    pub fn perturb(&self, v: &PotentialSpec, beta: RBig) -> PotentialSpec {
        v.add_linear_term(PERTURBATION, beta, &self.coeffs)
    }
}

/// `⟨A⟩ = dE/dβ` at `β = 0` for the root `root` of `H_D^d`.
///
/// The slope is `-H_β / H_E` from dual-number tangents; the constant term of
/// `A` contributes exactly `A_0`. When `H_E` vanishes identically at the root
/// (the root is exact and multiple), the ratio is taken symmetrically at
/// `root ± 10^{-P/3}` where it is finite.
pub fn expectation(
    v: &PotentialSpec,
    a: &ObservableSpec,
    spec: &HankelSpec,
    root: &BigReal,
    prec: Precision,
) -> Result<BigReal> {
    let base = ensure_order(v, spec.max_index())?;
    let perturbed = a.perturb(&base, RBig::ZERO);
    let (shifted, shift) = shift_constant(&perturbed);
    let e = root.with_precision(prec) - BigReal::from_rational(&shift, prec);

    let slope_at = |e: &BigReal| -> Result<Option<BigReal>> {
        let h = det_dual(&shifted, e, Some(PERTURBATION), spec, prec)?;
        if h.d_energy.is_zero() {
            return Ok(None);
        }
        Ok(Some(-(&h.d_param / &h.d_energy)))
    };

    let slope = match slope_at(&e)? {
        Some(s) => s,
        None => {
            let delta = BigReal::ten_pow(-(prec.digits() as i64) / 3, prec) * e.abs().max(&BigReal::one(prec));
            match (slope_at(&(&e + &delta))?, slope_at(&(&e - &delta))?) {
                (Some(hi), Some(lo)) => (hi + lo) / BigReal::from_int(2, prec),
                _ => {
                    return Err(RpmError::Indeterminate(
                        "determinant derivative vanishes around the root".into(),
                    ))
                }
            }
        }
    };
    Ok(slope + BigReal::from_rational(a.constant(), prec))
}

/// Roots of `H_D^d` for `V + β A` over `betas`, each seeded with the
/// previous one.
pub fn energy_slope_scan(
    v: &PotentialSpec,
    a: &ObservableSpec,
    spec: &HankelSpec,
    betas: &[RBig],
    seed: &BigReal,
    opts: &SolveOptions,
) -> Result<Vec<(RBig, Root)>> {
    let mut out = Vec::with_capacity(betas.len());
    let mut guess = seed.clone();
    for beta in betas {
        let perturbed = a.perturb(&ensure_order(v, spec.max_index())?, beta.clone());
        let root = find_root_near(&perturbed, spec, &guess, opts).map_err(|e| RpmError::LostContinuation {
            dim: spec.dim,
            reason: format!("at beta = {beta}: {e}"),
        })?;
        guess = root.energy.clone();
        out.push((beta.clone(), root));
    }
    Ok(out)
}
