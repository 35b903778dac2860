//! Even-rank symmetric tensors: determinants and the discriminants built on them.
//!
//! Everything here is rank-generic over even `r`; rank 2 is the ordinary
//! matrix case and [`crate::classical`] is a thin layer on top.
//!
//! With a nonsingular metric `G` of the same rank, the discriminant of order
//! `s` is
//!
//! ```text
//! C_s(A) = E(A × s, G × (d-s)) / (s! (d-s)! det G)
//! ```
//!
//! where `E` is the epsilon sum of [`crate::epsilon`]. `C_0 = 1`,
//! `C_d = det A / det G`, and `C_s = 0` for `s > d`.

use itertools::Itertools;

use crate::classical::DiscriminantVector;
use crate::epsilon::EpsilonProduct;
use crate::error::{Error, Result};
use crate::permutation::all_permutations;
use crate::report::{identity_defect, max_abs, max_abs_tensor, Check, VerificationReport};
use crate::scalar::{binomial, factorial, Scalar};
use crate::tensor::{contract_full, contract_one_free, SymTensor};
use crate::ExactScalar;

/// Discriminants of `A` relative to `G`, with both determinants.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenInvariants<T> {
    pub discriminants: DiscriminantVector<T>,
    pub det_a: T,
    pub det_g: T,
}

fn require_even<T>(t: &SymTensor<T>) -> Result<()> {
    if !t.rank().is_multiple_of(2) {
        return Err(Error::UnsupportedRank {
            expected: "even rank",
            rank: t.rank(),
        });
    }
    Ok(())
}

fn require_pair<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>) -> Result<()> {
    require_even(a)?;
    if !a.same_shape(g) {
        return Err(Error::ShapeMismatch(format!(
            "tensor rank {} dim {} vs metric rank {} dim {}",
            a.rank(),
            a.dim(),
            g.rank(),
            g.dim()
        )));
    }
    Ok(())
}

/// `det A = E(A × d) / d!`, evaluated on the coset-restricted path.
pub fn det_even<T: Scalar>(a: &SymTensor<T>) -> Result<T> {
    require_even(a)?;
    let d = a.dim();
    let e = EpsilonProduct::new(vec![a; d])?.coset_restricted(d)?;
    Ok(e / factorial::<T>(d))
}

/// Cayley's determinant: `Σ_{π_2..π_r} Π sign(π_a) Π_i A[i, π_2(i), ..., π_r(i)]`.
///
/// Agrees with [`det_even`] for even rank. For odd rank it is generally nonzero
/// even though the epsilon sum vanishes.
pub fn cayley_det<T: Scalar>(a: &SymTensor<T>) -> Result<T> {
    let (r, d) = (a.rank(), a.dim());
    if r < 2 {
        return Err(Error::UnsupportedRank {
            expected: "rank >= 2",
            rank: r,
        });
    }
    let perms = all_permutations(d);
    let mut total = T::zero();
    let mut index = vec![0usize; r];
    for tuple in (0..r - 1).map(|_| perms.iter()).multi_cartesian_product() {
        let mut prod = T::one();
        let mut sign = 1i8;
        for p in &tuple {
            sign *= p.sign;
        }
        for i in 0..d {
            index[0] = i;
            for (slot, p) in tuple.iter().enumerate() {
                index[slot + 1] = p.mapping[i];
            }
            let v = a.component(&index)?;
            if v.is_zero() {
                prod = T::zero();
                break;
            }
            prod *= &v;
        }
        if sign > 0 {
            total += &prod;
        } else {
            total += &-prod;
        }
    }
    Ok(total)
}

/// `A^{-1} = (1/A) ∂A/∂A` (formal), i.e. the slot-freed epsilon sum scaled by
/// `1/((d-1)! det A)`. Satisfies `A^{i k..} A_{j k..} = δ^i_j`.
pub fn inverse_even<T: Scalar>(a: &SymTensor<T>) -> Result<SymTensor<T>> {
    require_even(a)?;
    let d = a.dim();
    let det = det_even(a)?;
    let inv_det = det.checked_recip().ok_or(Error::Singular { what: "tensor" })?;
    let grad = EpsilonProduct::new(vec![a; d])?.slot_gradient(0)?;
    Ok(grad.scale(&(inv_det / factorial::<T>(d - 1))))
}

fn normalization<T: Scalar>(s: usize, d: usize, det_g: &T) -> T {
    let mut n = factorial::<T>(s);
    n *= &factorial::<T>(d - s);
    n *= det_g;
    n
}

fn metric_det<T: Scalar>(g: &SymTensor<T>) -> Result<T> {
    let det = det_even(g)?;
    if det.checked_recip().is_none() {
        return Err(Error::Singular { what: "metric" });
    }
    Ok(det)
}

fn discriminant_with<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>, s: usize, det_g: &T) -> Result<T> {
    let d = a.dim();
    if s > d {
        return Ok(T::zero());
    }
    let e = EpsilonProduct::blocks(a, s, g)?.coset_restricted(s)?;
    Ok(e / normalization(s, d, det_g))
}

/// `C_s^G(A)` for a single order `s` (zero for `s > d`).
pub fn discriminant<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>, s: usize) -> Result<T> {
    require_pair(a, g)?;
    let det_g = metric_det(g)?;
    discriminant_with(a, g, s, &det_g)
}

/// `C_0..C_d` together with `det A` and `det G`.
pub fn discriminants_even<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>) -> Result<EvenInvariants<T>> {
    require_pair(a, g)?;
    let det_g = metric_det(g)?;
    let d = a.dim();
    let values = (0..=d)
        .map(|s| discriminant_with(a, g, s, &det_g))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvenInvariants {
        discriminants: DiscriminantVector::new(values),
        det_a: det_even(a)?,
        det_g,
    })
}

/// Formal derivative `∂C_s/∂A`.
pub fn grad_a_discriminant<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>, s: usize) -> Result<SymTensor<T>> {
    require_pair(a, g)?;
    let det_g = metric_det(g)?;
    let d = a.dim();
    if s == 0 || s > d {
        return SymTensor::zeros(a.rank(), d);
    }
    let positions: Vec<usize> = (0..s).collect();
    let grad = EpsilonProduct::blocks(a, s, g)?.gradient_over(&positions)?;
    Ok(grad.scale(&normalization(s, d, &det_g).checked_recip().expect("nonzero normalization")))
}

/// Formal derivative `∂C_s/∂G`, including the `-C_s G^{-1}` term from `1/det G`.
pub fn grad_g_discriminant<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>, s: usize) -> Result<SymTensor<T>> {
    require_pair(a, g)?;
    let det_g = metric_det(g)?;
    let d = a.dim();
    if s > d {
        return SymTensor::zeros(a.rank(), d);
    }
    let mut out = if s < d {
        let positions: Vec<usize> = (s..d).collect();
        let grad = EpsilonProduct::blocks(a, s, g)?.gradient_over(&positions)?;
        grad.scale(&normalization(s, d, &det_g).checked_recip().expect("nonzero normalization"))
    } else {
        SymTensor::zeros(a.rank(), d)?
    };
    let c_s = discriminant_with(a, g, s, &det_g)?;
    if !c_s.is_zero() {
        out = out.add_scaled(&inverse_even(g)?, &-c_s)?;
    }
    Ok(out)
}

/// Coefficients of `Σ_s (-λ)^{d-s} C_s`, highest power of `λ` first.
pub fn char_poly_even<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>) -> Result<Vec<T>> {
    let inv = discriminants_even(a, g)?;
    Ok(char_poly_from(&inv.discriminants))
}

pub(crate) fn char_poly_from<T: Scalar>(c: &DiscriminantVector<T>) -> Vec<T> {
    let d = c.dim();
    (0..=d)
        .map(|s| {
            // coefficient of λ^{d-s}
            let v = c.get(s);
            if (d - s).is_multiple_of(2) {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Horner evaluation of a highest-first coefficient list.
pub fn eval_poly<T: Scalar>(coeffs: &[T], x: &T) -> T {
    let mut acc = T::zero();
    for c in coeffs {
        acc *= x;
        acc += c;
    }
    acc
}

/// `N[(a,b),(p,q)] = Σ_{mn} X[a,b,m,n] Y[m,n,p,q]` for rank-4 tensors, as a
/// dense `d² × d²` row-major array.
fn pair_contract<T: Scalar>(x: &[T], y: &[T], d: usize) -> Vec<T> {
    let dd = d * d;
    let mut out = vec![T::zero(); dd * dd];
    for ab in 0..dd {
        for mn in 0..dd {
            let xv = &x[ab * dd + mn];
            if xv.is_zero() {
                continue;
            }
            for pq in 0..dd {
                let mut t = xv.clone();
                t *= &y[mn * dd + pq];
                out[ab * dd + pq] += &t;
            }
        }
    }
    out
}

fn square_trace<T: Scalar>(m: &[T], n: usize) -> T {
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            let mut t = m[i * n + j].clone();
            t *= &m[j * n + i];
            acc += &t;
        }
    }
    acc
}

fn require_rank4_d2<T>(a: &SymTensor<T>) -> Result<()> {
    if a.rank() != 4 {
        return Err(Error::UnsupportedRank {
            expected: "rank 4",
            rank: a.rank(),
        });
    }
    if a.dim() != 2 {
        return Err(Error::UnsupportedDimension {
            expected: 2,
            dim: a.dim(),
        });
    }
    Ok(())
}

/// Closed form of `C_2` for rank 4, `d = 2`, in terms of the contravariant
/// metric `G^{ijkl}` (= `inverse_even(G)`):
///
/// `½[(G^{ijkl}A_{ijkl})² − 4 G^{ijkl}A_{jklm}G^{mnpq}A_{npqi} + 3 G^{ijkl}A_{klmn}G^{mnpq}A_{pqij}]`.
pub fn discriminant2_closed_form<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>) -> Result<T> {
    require_rank4_d2(a)?;
    require_pair(a, g)?;
    let g_up = inverse_even(g)?;
    let d = a.dim();
    let trace = contract_full(&g_up, a)?;
    let one = contract_one_free(&g_up, a)?;
    let one_chain = one.mul(&one).trace();
    let two = pair_contract(&g_up.to_dense(), &a.to_dense(), d);
    let two_chain = square_trace(&two, d * d);
    let mut total = trace.clone();
    total *= &trace;
    let mut t = one_chain;
    t *= &T::from_int(4);
    total = total - t;
    let mut t = two_chain;
    t *= &T::from_int(3);
    total += &t;
    Ok(total / T::from_int(2))
}

/// Residual tensor of the `d = 2` fourth-rank polynomial identity
///
/// `(G^{mnpq}A_{mnpq}) A_{ijkl} − 4 A_{(i|mnp}G^{mnpq}A_{q|jkl)} + 3 A_{(ij|mn}G^{mnpq}A_{pq|kl)} − C_2 G_{ijkl}`
///
/// where `(·)` is the mean over orderings of the free indices `ijkl`.
pub fn poly_identity_residual_d2<T: Scalar>(a: &SymTensor<T>, g: &SymTensor<T>) -> Result<SymTensor<T>> {
    require_rank4_d2(a)?;
    require_pair(a, g)?;
    let d = a.dim();
    let g_up = inverse_even(g)?;
    let a_dense = a.to_dense();
    let trace = contract_full(&g_up, a)?;

    // M[i][q] = A_{imnp} G^{mnpq}
    let m = contract_one_free(a, &g_up)?;
    let mut one_index = vec![T::zero(); d.pow(4)];
    for (flat, slot) in one_index.iter_mut().enumerate() {
        let (i, rest) = (flat / d.pow(3), flat % d.pow(3));
        for q in 0..d {
            let mut t = m.get(i, q).clone();
            t *= &a_dense[q * d.pow(3) + rest];
            *slot += &t;
        }
    }
    let n = pair_contract(&a_dense, &g_up.to_dense(), d);
    let two_index = pair_contract(&n, &a_dense, d);

    let term2 = SymTensor::symmetrize_dense(4, d, &one_index)?;
    let term3 = SymTensor::symmetrize_dense(4, d, &two_index)?;
    let c2 = discriminant(a, g, 2)?;
    a.scale(&trace)
        .add_scaled(&term2, &T::from_int(-4))?
        .add_scaled(&term3, &T::from_int(3))?
        .add_scaled(g, &-c2)
}

/// Residual tensor of the metric-free `d = 2` identity obtained with `G = A`:
///
/// `A_{(ij|mn}A^{mnpq}A_{pq|kl)} − ½ (A^{mnpq}A_{pqrs}A^{rstu}A_{tumn}) A_{ijkl}`.
pub fn self_identity_residual_d2<T: Scalar>(a: &SymTensor<T>) -> Result<SymTensor<T>> {
    require_rank4_d2(a)?;
    let d = a.dim();
    let a_up = inverse_even(a)?;
    let a_dense = a.to_dense();
    let n = pair_contract(&a_dense, &a_up.to_dense(), d);
    let chain = square_trace(&n, d * d);
    let two_index = pair_contract(&n, &a_dense, d);
    let term = SymTensor::symmetrize_dense(4, d, &two_index)?;
    term.add_scaled(a, &-(chain / T::from_int(2)))
}

fn recurrence_rows(
    a: &SymTensor<ExactScalar>,
    g: &SymTensor<ExactScalar>,
    g_inv: &SymTensor<ExactScalar>,
    report: &mut VerificationReport,
    label: &str,
) -> Result<()> {
    let d = a.dim();
    let det_g = metric_det(g)?;
    for s in 0..=d {
        let lhs = grad_g_discriminant(a, g, s)?.add_scaled(g_inv, &discriminant_with(a, g, s, &det_g)?)?;
        let rhs = grad_a_discriminant(a, g, s + 1)?;
        let residual = max_abs_tensor(&lhs.sub(&rhs)?);
        let relation = if s == d {
            "dC_d/dG + C_d G^-1 = 0".to_string()
        } else {
            format!("dC_{s}/dG + C_{s} G^-1 = dC_{}/dA", s + 1)
        };
        report.push(Check::exact(format!("{label} recurrence s={s}"), relation, &residual, 0));
    }
    Ok(())
}

/// Residuals of `∂C_s/∂G + C_s G^{-1} − ∂C_{s+1}/∂A` for `s = 0..d`, with
/// `G^{-1} = inverse_even(G)` and `C_{d+1} ≡ 0`.
pub fn verify_recurrence_even(a: &SymTensor<ExactScalar>, g: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    require_pair(a, g)?;
    let mut report = VerificationReport::new(format!("rank-{} recurrence", a.rank()));
    recurrence_rows(a, g, &inverse_even(g)?, &mut report, &format!("rank-{}", a.rank()))?;
    Ok(report)
}

/// Residual of the higher-rank Cayley–Hamilton identity `∂C_d/∂G + C_d G^{-1} = 0`.
pub fn verify_ch_even(a: &SymTensor<ExactScalar>, g: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    require_pair(a, g)?;
    let d = a.dim();
    let lhs = grad_g_discriminant(a, g, d)?.add_scaled(&inverse_even(g)?, &discriminant(a, g, d)?)?;
    let mut report = VerificationReport::new(format!("rank-{} Cayley-Hamilton", a.rank()));
    report.push(Check::exact(
        format!("rank-{} Cayley-Hamilton", a.rank()),
        "dC_d/dG + C_d G^-1 = 0",
        &max_abs_tensor(&lhs),
        0,
    ));
    Ok(report)
}

/// The `d = 2` fourth-rank polynomial identity with metric `G`.
pub fn verify_poly_identity_d2(a: &SymTensor<ExactScalar>, g: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    let residual = poly_identity_residual_d2(a, g)?;
    let mut report = VerificationReport::new("rank-4 d=2 polynomial identity");
    report.push(Check::exact(
        "rank-4 polynomial identity",
        "(G.A) A - 4 A(i|G|A jkl) + 3 A(ij|G|A kl) - C_2 G = 0",
        &max_abs_tensor(&residual),
        0,
    ));
    Ok(report)
}

/// The metric-free `d = 2` identity (`G = A`).
pub fn verify_self_identity_d2(a: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    let residual = self_identity_residual_d2(a)?;
    let mut report = VerificationReport::new("rank-4 d=2 self identity");
    report.push(Check::exact(
        "rank-4 self identity",
        "A(ij|A^-1|A kl) - 1/2 tr[(A^-1 A)^2] A = 0",
        &max_abs_tensor(&residual),
        0,
    ));
    Ok(report)
}

/// Largest entry of `A^{ik..} A_{jk..} − δ` for the gradient inverse.
pub fn inverse_contraction_defect(a: &SymTensor<ExactScalar>) -> Result<ExactScalar> {
    let inv = inverse_even(a)?;
    Ok(identity_defect(&contract_one_free(&inv, a)?))
}

/// `C_d^G(A − λG) − Σ_s (−λ)^{d−s} C_s^G(A)` at the given sample points.
pub fn char_poly_defect(a: &SymTensor<ExactScalar>, g: &SymTensor<ExactScalar>, lambdas: &[ExactScalar]) -> Result<ExactScalar> {
    let coeffs = char_poly_even(a, g)?;
    let d = a.dim();
    let mut worst = Vec::with_capacity(lambdas.len());
    for lambda in lambdas {
        let shifted = a.add_scaled(g, &-lambda.clone())?;
        let lhs = discriminant(&shifted, g, d)?;
        worst.push(lhs - eval_poly(&coeffs, lambda));
    }
    Ok(max_abs(&worst))
}

/// `C_s^G(A) = C(d, s)` when `G = A`.
pub fn binomial_defect(a: &SymTensor<ExactScalar>) -> Result<ExactScalar> {
    let inv = discriminants_even(a, a)?;
    let d = a.dim();
    let diffs: Vec<ExactScalar> = (0..=d)
        .map(|s| inv.discriminants.get(s) - ExactScalar::from_u64(binomial(d, s)))
        .collect();
    Ok(max_abs(&diffs))
}

pub(crate) fn is_nonsingular<T: Scalar>(a: &SymTensor<T>) -> bool {
    det_even(a).map(|v| !v.is_zero()).unwrap_or(false)
}
