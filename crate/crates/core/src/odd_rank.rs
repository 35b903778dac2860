//! Third-rank tensors and their lift to sixth rank.
//!
//! With an odd number of epsilons every term of the naive determinant cancels
//! against the term with two slots exchanged, so the determinant is taken on the
//! lift `S = sym(s ⊗ s)` instead. In two dimensions the lift's determinant is a
//! fixed multiple of the quartic invariant `s²` below.
//!
//! Components of a `d = 2` third-rank tensor are abbreviated
//! `s0 = s_000`, `s1 = s_001`, `s2 = s_011`, `s3 = s_111`.

use crate::even_rank::{det_even, inverse_even};
use crate::epsilon::EpsilonProduct;
use crate::error::{Error, Result};
use crate::report::{identity_defect, max_abs, max_abs_tensor, Check, VerificationReport};
use crate::scalar::{powi, Dual, Scalar};
use crate::tensor::{canonical_keys, contract_full, contract_one_free, multiplicity, sym_outer, SymTensor};
use crate::{sample::Sampler, ExactScalar};

/// The sixth-rank lift of a third-rank tensor and its determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct OddLiftResult<T> {
    pub lifted: SymTensor<T>,
    pub det: T,
    /// The quartic invariant, `d = 2` only.
    pub s_squared: Option<T>,
    /// `det / s²` when `d = 2` and `s² ≠ 0`.
    pub kappa: Option<T>,
}

fn require_rank3<T>(s: &SymTensor<T>) -> Result<()> {
    if s.rank() != 3 {
        return Err(Error::UnsupportedRank {
            expected: "rank 3",
            rank: s.rank(),
        });
    }
    Ok(())
}

fn require_d2<T>(s: &SymTensor<T>) -> Result<()> {
    require_rank3(s)?;
    if s.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            dim: s.dim(),
        });
    }
    Ok(())
}

/// The unnormalized epsilon sum `ε···ε s···s` with all `d` slots holding `s`.
/// Zero for every `d ≥ 2`; at `d = 1` it is just `s_000`.
pub fn odd_epsilon_sum<T: Scalar>(s: &SymTensor<T>) -> Result<T> {
    Ok(EpsilonProduct::new(vec![s; s.dim()])?.value())
}

pub fn verify_odd_epsilon_vanishes(s: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("odd-rank epsilon sum");
    report.push(Check::exact(
        "odd-rank epsilon sum",
        "eps...eps s...s = 0 (odd number of epsilons)",
        &odd_epsilon_sum(s)?,
        0,
    ));
    Ok(report)
}

fn components<T: Scalar>(s: &SymTensor<T>) -> [T; 4] {
    [
        s.canonical(&[0, 0, 0]),
        s.canonical(&[0, 0, 1]),
        s.canonical(&[0, 1, 1]),
        s.canonical(&[1, 1, 1]),
    ]
}

fn monomial<T: Scalar>(coeff: i64, factors: &[&T]) -> T {
    let mut acc = T::from_int(coeff);
    for f in factors {
        acc *= f;
    }
    acc
}

/// `s² = s0² s3² − 6 s0 s1 s2 s3 + 4 s0 s2³ + 4 s3 s1³ − 3 s1² s2²`.
pub fn s_squared_d2<T: Scalar>(s: &SymTensor<T>) -> Result<T> {
    require_d2(s)?;
    let [s0, s1, s2, s3] = components(s);
    let mut acc = monomial(1, &[&s0, &s0, &s3, &s3]);
    acc += &monomial(-6, &[&s0, &s1, &s2, &s3]);
    acc += &monomial(4, &[&s0, &s2, &s2, &s2]);
    acc += &monomial(4, &[&s3, &s1, &s1, &s1]);
    acc += &monomial(-3, &[&s1, &s1, &s2, &s2]);
    Ok(acc)
}

/// `S = sym(s ⊗ s)` and its sixth-rank determinant.
pub fn lift<T: Scalar>(s: &SymTensor<T>) -> Result<OddLiftResult<T>> {
    require_rank3(s)?;
    let lifted = sym_outer(s, s)?;
    let det = det_even(&lifted)?;
    let (s_squared, kappa) = if s.dim() == 2 {
        let sq = s_squared_d2(s)?;
        let kappa = sq.checked_recip().map(|inv| {
            let mut k = det.clone();
            k *= &inv;
            k
        });
        (Some(sq), kappa)
    } else {
        (None, None)
    };
    Ok(OddLiftResult {
        lifted,
        det,
        s_squared,
        kappa,
    })
}

/// The `d = 2` inverse from its closed forms, e.g.
/// `s^{000} = (s0 s3² + 2 s2³ − 3 s1 s2 s3)/s²`; the `1 ↔ 0` relabeling gives
/// `s^{111}` and `s^{011}`.
pub fn inverse_odd_d2<T: Scalar>(s: &SymTensor<T>) -> Result<SymTensor<T>> {
    let sq = s_squared_d2(s)?;
    let inv = sq.checked_recip().ok_or(Error::Singular { what: "third-rank tensor (s^2 = 0)" })?;
    let [s0, s1, s2, s3] = components(s);

    let lead = |a0: &T, a1: &T, a2: &T, a3: &T| {
        let mut v = monomial(1, &[a0, a3, a3]);
        v += &monomial(2, &[a2, a2, a2]);
        v += &monomial(-3, &[a1, a2, a3]);
        v
    };
    let mixed = |a0: &T, a1: &T, a2: &T, a3: &T| {
        let mut v = monomial(2, &[a3, a1, a1]);
        v += &monomial(-1, &[a0, a2, a3]);
        v += &monomial(-1, &[a1, a2, a2]);
        v
    };
    let mut out = SymTensor::zeros(3, 2)?;
    let scaled = |mut v: T| {
        v *= &inv;
        v
    };
    out.set(&[0, 0, 0], scaled(lead(&s0, &s1, &s2, &s3)))?;
    out.set(&[0, 0, 1], scaled(mixed(&s0, &s1, &s2, &s3)))?;
    out.set(&[0, 1, 1], scaled(mixed(&s3, &s2, &s1, &s0)))?;
    out.set(&[1, 1, 1], scaled(lead(&s3, &s2, &s1, &s0)))?;
    Ok(out)
}

/// `∂s²/∂(stored component)` for each canonical key, by forward-mode dual numbers.
///
/// These are derivatives with respect to the stored value, which stands for
/// `multiplicity(key)` ordered components.
pub fn s_squared_canonical_gradient<T: Scalar>(s: &SymTensor<T>) -> Result<SymTensor<T>> {
    require_d2(s)?;
    let base: SymTensor<Dual<T>> = s.map(|v| Dual::constant(v.clone()));
    let mut out = SymTensor::zeros(3, 2)?;
    for key in canonical_keys(3, 2) {
        let mut probe = base.clone();
        probe.set(&key, Dual::variable(s.canonical(&key)))?;
        out.set(&key, s_squared_d2(&probe)?.du)?;
    }
    Ok(out)
}

/// The `d = 2` inverse as `s^{ijk} = (1/(2 s²)) ∂s²/∂s_{ijk}` with formal derivatives.
pub fn inverse_odd_d2_by_gradient<T: Scalar>(s: &SymTensor<T>) -> Result<SymTensor<T>> {
    let sq = s_squared_d2(s)?;
    let inv = sq.checked_recip().ok_or(Error::Singular { what: "third-rank tensor (s^2 = 0)" })?;
    let canonical = s_squared_canonical_gradient(s)?;
    let mut out = SymTensor::zeros(3, 2)?;
    for (key, v) in canonical.iter() {
        let mut formal = v.clone() / T::from_u64(multiplicity(key));
        formal *= &inv;
        formal = formal / T::from_int(2);
        out.set(key, formal)?;
    }
    Ok(out)
}

/// Inverse candidate for any dimension: `(1/(2D)) ∂D/∂s` with `D = det(lift(s))`.
///
/// By the chain rule through the symmetrized product this equals
/// `S^{ijk xyz} s_{xyz}` with `S^{-1}` the sixth-rank gradient inverse, which
/// is how it is computed. For `d = 2` it reproduces [`inverse_odd_d2`]; for
/// `d > 2` the defining contraction is not guaranteed to give `δ`.
pub fn inverse_candidate_via_lift<T: Scalar>(s: &SymTensor<T>) -> Result<SymTensor<T>> {
    require_rank3(s)?;
    let lifted = sym_outer(s, s)?;
    let big_inv = inverse_even(&lifted).map_err(|e| match e {
        Error::Singular { .. } => Error::Singular { what: "lifted sixth-rank tensor" },
        other => other,
    })?;
    let d = s.dim();
    let mut out = SymTensor::zeros(3, d)?;
    let mut joined = Vec::with_capacity(6);
    for key in canonical_keys(3, d) {
        let mut acc = T::zero();
        for (inner, v) in s.iter() {
            joined.clear();
            joined.extend_from_slice(&key);
            joined.extend_from_slice(inner);
            joined.sort_unstable();
            let mut term = big_inv.canonical(&joined);
            term *= v;
            term *= &T::from_u64(multiplicity(inner));
            acc += &term;
        }
        out.set(&key, acc)?;
    }
    Ok(out)
}

/// Checks the closed-form inverse against the gradient and lift routes. Also
/// checks the defining contraction and the `1/3` factor between canonical and
/// formal derivatives at `s_{001}`.
pub fn verify_odd_inverse_d2(s: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    let closed = inverse_odd_d2(s)?;
    let by_gradient = inverse_odd_d2_by_gradient(s)?;
    let by_lift = inverse_candidate_via_lift(s)?;
    let mut report = VerificationReport::new("odd-rank d=2 inverse");
    report.push(Check::exact(
        "third-rank inverse: closed form vs gradient",
        "s^ijk = (1/2s^2) ds^2/ds_ijk",
        &max_abs_tensor(&closed.sub(&by_gradient)?),
        0,
    ));
    report.push(Check::exact(
        "third-rank inverse: closed form vs lift",
        "s^ijk = S^ijkxyz s_xyz",
        &max_abs_tensor(&closed.sub(&by_lift)?),
        0,
    ));
    report.push(Check::exact(
        "third-rank inverse contraction",
        "s^ikl s_jkl = delta^i_j",
        &identity_defect(&contract_one_free(&closed, s)?),
        0,
    ));
    report.push(Check::exact(
        "third-rank inverse trace",
        "s^ijk s_ijk = 2",
        &(contract_full(&closed, s)? - ExactScalar::from_int(2)),
        0,
    ));
    let canonical = s_squared_canonical_gradient(s)?;
    let sq = s_squared_d2(s)?;
    let mut third = canonical.canonical(&[0, 0, 1]) / (ExactScalar::from_int(6) * sq.clone());
    third -= closed.canonical(&[0, 0, 1]);
    let mut first = canonical.canonical(&[0, 0, 0]) / (ExactScalar::from_int(2) * sq);
    first -= closed.canonical(&[0, 0, 0]);
    report.push(Check::exact(
        "canonical derivative multiplicity",
        "s^001 = (1/3)(1/2s^2) ds^2/ds_001, s^000 = (1/2s^2) ds^2/ds_000",
        &max_abs([&third, &first]),
        0,
    ));
    Ok(report)
}

/// Same-constant check `det(lift(s)) = κ s²` over `samples` random tensors
/// (sample `k` uses seed `seed + k`). Degenerate samples (`s² = 0`) must have
/// `det = 0`. The measured κ is recorded under `constants["kappa"]`.
pub fn verify_proportionality(samples: usize, seed: u64) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("odd-rank lift proportionality");
    let mut kappa: Option<ExactScalar> = None;
    let mut residuals = Vec::new();
    for k in 0..samples as u64 {
        let sample_seed = seed.wrapping_add(k);
        let s: SymTensor<ExactScalar> = Sampler::new(sample_seed).symmetric(3, 2)?;
        let result = lift(&s)?;
        match result.kappa {
            Some(ratio) => {
                let reference = kappa.get_or_insert_with(|| ratio.clone()).clone();
                residuals.push((sample_seed, ratio - reference, false));
            }
            None => residuals.push((sample_seed, result.det, true)),
        }
    }
    let kappa = kappa.ok_or(Error::AllSamplesDegenerate)?;
    for (sample_seed, residual, degenerate) in residuals {
        let (identity, relation) = if degenerate {
            ("lift determinant of degenerate sample", "s^2 = 0 => det S = 0")
        } else {
            ("lift determinant proportionality", "det S / s^2 = kappa")
        };
        report.push(Check::exact(identity, relation, &residual, sample_seed));
    }
    report.constants.insert("kappa".into(), kappa.to_string());
    Ok(report)
}

/// `det(lift(λ s)) − λ^{2d} det(lift(s))`.
pub fn lift_scaling_defect(s: &SymTensor<ExactScalar>, lambda: &ExactScalar) -> Result<ExactScalar> {
    let base = lift(s)?.det;
    let scaled = lift(&s.scale(lambda))?.det;
    Ok(scaled - base * powi(lambda, 2 * s.dim()))
}
