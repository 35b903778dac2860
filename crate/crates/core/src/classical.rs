//! Rank-2 reference layer. Matrix discriminants are built two ways here, from
//! power sums through the Newton relations and from epsilon sums.
//!
//! Matrices are covariant rank-2 [`SymTensor`]s. A [`MetricPair`] supplies the
//! contravariant `g^{ij}` used for products and traces.

use num_traits::One;

use crate::dense::Matrix;
use crate::epsilon::EpsilonProduct;
use crate::error::{Error, Result};
use crate::even_rank::{
    char_poly_from, det_even, discriminant, discriminants_even, grad_a_discriminant, grad_g_discriminant,
    inverse_even,
};
use crate::report::{identity_defect, max_abs, max_abs_tensor, Check, VerificationReport};
use crate::scalar::{factorial, Scalar};
use crate::tensor::SymTensor;
use crate::ExactScalar;

/// Covariant metric with its inverse and determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricPair<T> {
    pub g: SymTensor<T>,
    pub g_inv: SymTensor<T>,
    pub g_det: T,
}

/// Discriminants `c_0..c_d`. Orders past `d` read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscriminantVector<T> {
    values: Vec<T>,
}

impl<T: Scalar> DiscriminantVector<T> {
    pub fn new(values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "discriminant vector holds at least c_0");
        DiscriminantVector { values }
    }

    /// The dimension `d` (one less than the number of stored values).
    pub fn dim(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, s: usize) -> T {
        self.values.get(s).cloned().unwrap_or_else(T::zero)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

fn require_matrix<T>(a: &SymTensor<T>) -> Result<()> {
    if a.rank() != 2 {
        return Err(Error::UnsupportedRank {
            expected: "rank 2",
            rank: a.rank(),
        });
    }
    Ok(())
}

fn require_metric_dim<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>) -> Result<()> {
    require_matrix(a)?;
    if a.dim() != m.g.dim() {
        return Err(Error::ShapeMismatch(format!(
            "matrix dim {} vs metric dim {}",
            a.dim(),
            m.g.dim()
        )));
    }
    Ok(())
}

/// Inverts `g` through its cofactor gradient, `g^{ij} = (1/g) ∂g/∂g_{ij}`.
pub fn metric_inverse<T: Scalar>(g: &SymTensor<T>) -> Result<MetricPair<T>> {
    require_matrix(g)?;
    let g_det = det_even(g)?;
    if g_det.is_zero() {
        return Err(Error::Singular { what: "metric" });
    }
    Ok(MetricPair {
        g: g.clone(),
        g_inv: inverse_even(g)?,
        g_det,
    })
}

/// `c_{ij} = a_{ik} g^{lk} b_{lj}` without symmetrization.
pub fn g_product_matrix<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>, m: &MetricPair<T>) -> Matrix<T> {
    a.mul(&Matrix::from_sym(&m.g_inv).transpose()).mul(b)
}

/// The metric product, symmetrized for storage.
///
/// Powers of a single symmetric matrix are already symmetric
/// (`(a G)^k a` is its own transpose), so for power sums the
/// symmetrization changes nothing.
pub fn g_product<T: Scalar>(a: &SymTensor<T>, b: &SymTensor<T>, m: &MetricPair<T>) -> Result<SymTensor<T>> {
    require_metric_dim(a, m)?;
    require_metric_dim(b, m)?;
    let c = g_product_matrix(&Matrix::from_sym(a), &Matrix::from_sym(b), m);
    let d = a.dim();
    let mut out = SymTensor::zeros(2, d)?;
    let half = T::from_ratio(1, 2);
    for i in 0..d {
        for j in i..d {
            let mut v = c.get(i, j).clone();
            v += c.get(j, i);
            v *= &half;
            out.set(&[i, j], v)?;
        }
    }
    Ok(out)
}

/// `tr_g(a) = g^{ij} a_{ij}`.
pub fn g_trace<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>) -> Result<T> {
    require_metric_dim(a, m)?;
    crate::tensor::contract_full(&m.g_inv, a)
}

/// `[Q_0, Q_1, ..., Q_max]` with `Q_s = tr_g(a^s)` and `Q_0 = d`.
pub fn power_sums<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>, max_s: usize) -> Result<Vec<T>> {
    require_metric_dim(a, m)?;
    if max_s == 0 {
        return Err(Error::Precondition("power sums need max_s >= 1".into()));
    }
    let mut out = Vec::with_capacity(max_s + 1);
    out.push(T::from_u64(a.dim() as u64));
    let mut power = a.clone();
    out.push(g_trace(&power, m)?);
    for _ in 2..=max_s {
        power = g_product(&power, a, m)?;
        out.push(g_trace(&power, m)?);
    }
    Ok(out)
}

/// Newton's identities: from power sums `[Q_1..Q_n]` to elementary symmetric
/// polynomials `[P_0..P_n]`, via `s·P_s = Σ_{i=1}^{s} (−1)^{i−1} P_{s−i} Q_i`.
pub fn newton_elementary_from_power<T: Scalar>(q: &[T]) -> Vec<T> {
    let mut p = Vec::with_capacity(q.len() + 1);
    p.push(T::one());
    for s in 1..=q.len() {
        let mut acc = T::zero();
        for i in 1..=s {
            let mut term = p[s - i].clone();
            term *= &q[i - 1];
            if i % 2 == 1 {
                acc += &term;
            } else {
                acc += &-term;
            }
        }
        p.push(acc / T::from_u64(s as u64));
    }
    p
}

/// Discriminants from traces of metric powers.
pub fn discriminants_trace<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>) -> Result<DiscriminantVector<T>> {
    require_metric_dim(a, m)?;
    let d = a.dim();
    let q = power_sums(a, m, d.max(1))?;
    let mut p = newton_elementary_from_power(&q[1..]);
    p.truncate(d + 1);
    Ok(DiscriminantVector::new(p))
}

/// Discriminants from epsilon contractions with `s` copies of `a` and `d − s` of `g`.
pub fn discriminants_epsilon<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>) -> Result<DiscriminantVector<T>> {
    require_metric_dim(a, m)?;
    Ok(discriminants_even(a, &m.g)?.discriminants)
}

/// `det a = E(a × d) / d!`.
pub fn det2<T: Scalar>(a: &SymTensor<T>) -> Result<T> {
    require_matrix(a)?;
    det_even(a)
}

/// `a^{ij} = 1/((d−1)! det a) · ε^{i..} ε^{j..} a ··· a`.
pub fn inverse2<T: Scalar>(a: &SymTensor<T>) -> Result<SymTensor<T>> {
    require_matrix(a)?;
    inverse_even(a)
}

/// Coefficients of `Σ_s (−λ)^{d−s} c_s^g(a)`, highest power first.
pub fn char_poly2<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>) -> Result<Vec<T>> {
    Ok(char_poly_from(&discriminants_epsilon(a, m)?))
}

/// `Σ_{k=0}^{d} (−1)^k c_k a^{d−k}` with metric powers and `a^0 = g`; zero by
/// Cayley–Hamilton.
pub fn cayley_hamilton_matrix<T: Scalar>(a: &SymTensor<T>, m: &MetricPair<T>) -> Result<Matrix<T>> {
    require_metric_dim(a, m)?;
    let d = a.dim();
    let c = discriminants_epsilon(a, m)?;
    let am = Matrix::from_sym(a);
    let mut powers = vec![Matrix::from_sym(&m.g)];
    for k in 1..=d {
        powers.push(g_product_matrix(&powers[k - 1], &am, m));
    }
    let mut total = Matrix::zeros(d);
    for k in 0..=d {
        let mut coeff = c.get(k);
        if k % 2 == 1 {
            coeff = -coeff;
        }
        total = total.add_scaled(&powers[d - k], &coeff);
    }
    Ok(total)
}

fn flux_rows(a: &SymTensor<ExactScalar>, m: &MetricPair<ExactScalar>, report: &mut VerificationReport) -> Result<()> {
    // ∂(g c_s)/∂g = ∂(g c_{s+1})/∂a, both sides straight from the epsilon sums
    let d = a.dim();
    for s in 0..d {
        let lhs = {
            let positions: Vec<usize> = (s..d).collect();
            let grad = EpsilonProduct::blocks(a, s, &m.g)?.gradient_over(&positions)?;
            let mut n = factorial::<ExactScalar>(s);
            n *= &factorial::<ExactScalar>(d - s);
            grad.scale(&n.recip())
        };
        let rhs = {
            let positions: Vec<usize> = (0..=s).collect();
            let grad = EpsilonProduct::blocks(a, s + 1, &m.g)?.gradient_over(&positions)?;
            let mut n = factorial::<ExactScalar>(s + 1);
            n *= &factorial::<ExactScalar>(d - s - 1);
            grad.scale(&n.recip())
        };
        report.push(Check::exact(
            format!("rank-2 density flux s={s}"),
            format!("d(g c_{s})/dg = d(g c_{})/da", s + 1),
            &max_abs_tensor(&lhs.sub(&rhs)?),
            0,
        ));
    }
    Ok(())
}

/// Recurrence `∂c_s/∂g + c_s g^{-1} − ∂c_{s+1}/∂a = 0` for `s = 0..d`, plus the
/// undivided form `∂(g c_s)/∂g = ∂(g c_{s+1})/∂a` for `s < d`.
pub fn verify_recurrence2(a: &SymTensor<ExactScalar>, m: &MetricPair<ExactScalar>) -> Result<VerificationReport> {
    require_metric_dim(a, m)?;
    let d = a.dim();
    let mut report = VerificationReport::new("rank-2 recurrence");
    for s in 0..=d {
        let lhs = grad_g_discriminant(a, &m.g, s)?.add_scaled(&m.g_inv, &discriminant(a, &m.g, s)?)?;
        let rhs = grad_a_discriminant(a, &m.g, s + 1)?;
        report.push(Check::exact(
            format!("rank-2 recurrence s={s}"),
            format!("dc_{s}/dg + c_{s} g^-1 = dc_{}/da", s + 1),
            &max_abs_tensor(&lhs.sub(&rhs)?),
            0,
        ));
    }
    flux_rows(a, m, &mut report)?;
    Ok(report)
}

/// Cayley–Hamilton in gradient form (`∂c_d/∂g + c_d g^{-1} = 0`) and in matrix
/// form (`a^d − c_1 a^{d−1} + ... ± c_d g = 0` with metric powers).
pub fn verify_cayley_hamilton2(a: &SymTensor<ExactScalar>, m: &MetricPair<ExactScalar>) -> Result<VerificationReport> {
    require_metric_dim(a, m)?;
    let d = a.dim();
    let mut report = VerificationReport::new("rank-2 Cayley-Hamilton");
    let lhs = grad_g_discriminant(a, &m.g, d)?.add_scaled(&m.g_inv, &discriminant(a, &m.g, d)?)?;
    report.push(Check::exact(
        "rank-2 Cayley-Hamilton (gradient form)",
        "dc_d/dg + c_d g^-1 = 0",
        &max_abs_tensor(&lhs),
        0,
    ));
    let matrix = cayley_hamilton_matrix(a, m)?;
    report.push(Check::exact(
        "rank-2 Cayley-Hamilton (matrix form)",
        "sum_k (-1)^k c_k a^(d-k) = 0",
        &max_abs(matrix.entries()),
        0,
    ));
    Ok(report)
}

/// Gradient inverse versus Gauss–Jordan elimination, and `a^{ik} a_{jk} = δ`.
pub fn verify_inverse2(a: &SymTensor<ExactScalar>) -> Result<VerificationReport> {
    let inv = inverse2(a)?;
    let mut report = VerificationReport::new("rank-2 inverse");
    let contraction = crate::tensor::contract_one_free(&inv, a)?;
    report.push(Check::exact(
        "rank-2 inverse contraction",
        "a^ik a_jk = delta^i_j",
        &identity_defect(&contraction),
        0,
    ));
    let eliminated = Matrix::from_sym(a).inverse().ok_or(Error::Singular { what: "tensor" })?;
    let diff = Matrix::from_sym(&inv).add_scaled(&eliminated, &-ExactScalar::one());
    report.push(Check::exact(
        "rank-2 inverse routes agree",
        "(1/c_d) dc_d/da = elimination inverse",
        &max_abs(diff.entries()),
        0,
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::random_symmetric;
    use num_traits::Zero;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(n, d)
    }

    fn sym2(rows: &[&[i64]]) -> SymTensor<ExactScalar> {
        let d = rows.len();
        let mut t = SymTensor::zeros(2, d).unwrap();
        for i in 0..d {
            for j in i..d {
                t.set(&[i, j], q(rows[i][j], 1)).unwrap();
            }
        }
        t
    }

    fn unit(d: usize) -> MetricPair<ExactScalar> {
        metric_inverse(&SymTensor::identity(d).unwrap()).unwrap()
    }

    #[test]
    fn metric_inverse_examples() {
        let m = unit(3);
        assert_eq!(m.g_inv, SymTensor::identity(3).unwrap());
        assert_eq!(m.g_det, q(1, 1));

        let m = metric_inverse(&sym2(&[&[2, 1], &[1, 3]])).unwrap();
        assert_eq!(m.g_det, q(5, 1));
        assert_eq!(m.g_inv.canonical(&[0, 0]), q(3, 5));
        assert_eq!(m.g_inv.canonical(&[0, 1]), q(-1, 5));
        assert_eq!(m.g_inv.canonical(&[1, 1]), q(2, 5));

        assert!(matches!(
            metric_inverse(&sym2(&[&[1, 1], &[1, 1]])),
            Err(Error::Singular { what: "metric" })
        ));
    }

    #[test]
    fn products_and_traces() {
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let m = unit(2);
        assert_eq!(g_product(&a, &a, &m).unwrap(), sym2(&[&[5, 5], &[5, 10]]));
        assert_eq!(g_trace(&a, &m).unwrap(), q(5, 1));
        assert_eq!(g_trace(&m.g, &m).unwrap(), q(2, 1));
        let z = SymTensor::zeros(2, 2).unwrap();
        assert!(g_product(&z, &a, &m).unwrap().is_zero());
        assert_eq!(g_trace(&z, &m).unwrap(), q(0, 1));

        let g = metric_inverse(&sym2(&[&[2, 1], &[1, 3]])).unwrap();
        let x: SymTensor<ExactScalar> = random_symmetric(2, 2, 3, 5).unwrap();
        assert_eq!(g_product(&x, &g.g, &g).unwrap(), x);
    }

    #[test]
    fn power_sum_examples() {
        let m = unit(2);
        assert_eq!(power_sums(&m.g, &m, 3).unwrap(), vec![q(2, 1); 4]);
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let p = power_sums(&a, &m, 2).unwrap();
        assert_eq!((p[1].clone(), p[2].clone()), (q(5, 1), q(15, 1)));
        let z = SymTensor::zeros(2, 2).unwrap();
        assert!(power_sums(&z, &m, 3).unwrap()[1..].iter().all(|v| v.is_zero()));
        assert!(power_sums(&a, &m, 0).is_err());
    }

    #[test]
    fn newton_examples() {
        assert_eq!(newton_elementary_from_power(&[q(2, 1), q(2, 1)]), vec![q(1, 1), q(2, 1), q(1, 1)]);
        assert_eq!(newton_elementary_from_power(&[q(5, 1), q(15, 1)]), vec![q(1, 1), q(5, 1), q(5, 1)]);
    }

    #[test]
    fn discriminant_examples() {
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let m = unit(2);
        let expected = [q(1, 1), q(5, 1), q(5, 1)];
        assert_eq!(discriminants_trace(&a, &m).unwrap().values(), &expected[..]);
        assert_eq!(discriminants_epsilon(&a, &m).unwrap().values(), &expected[..]);

        let g = metric_inverse(&sym2(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 2]])).unwrap();
        let c = discriminants_epsilon(&g.g, &g).unwrap();
        assert_eq!(c.values(), &[q(1, 1), q(3, 1), q(3, 1), q(1, 1)]);
        assert_eq!(c.get(4), q(0, 1));

        let z = SymTensor::zeros(2, 3).unwrap();
        assert_eq!(discriminants_trace(&z, &g).unwrap().values(), &[q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
    }

    #[test]
    fn determinant_and_inverse_examples() {
        let id = SymTensor::<ExactScalar>::identity(2).unwrap();
        assert_eq!(det2(&id).unwrap(), q(1, 1));
        assert_eq!(inverse2(&id).unwrap(), id);
        assert_eq!(det2(&sym2(&[&[2, 1], &[1, 3]])).unwrap(), q(5, 1));
        assert!(matches!(inverse2(&sym2(&[&[1, 1], &[1, 1]])), Err(Error::Singular { .. })));
    }

    #[test]
    fn characteristic_polynomial_examples() {
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let m = unit(2);
        assert_eq!(char_poly2(&a, &m).unwrap(), vec![q(1, 1), q(-5, 1), q(5, 1)]);
        assert_eq!(char_poly2(&m.g, &m).unwrap(), vec![q(1, 1), q(-2, 1), q(1, 1)]);
    }

    #[test]
    fn explicit_cayley_hamilton_example() {
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let m = unit(2);
        assert!(cayley_hamilton_matrix(&a, &m).unwrap().is_zero());
        let report = verify_cayley_hamilton2(&a, &m).unwrap();
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn self_metric_collapses_to_trivial_identities() {
        let a = sym2(&[&[2, 1], &[1, 3]]);
        let m = metric_inverse(&a).unwrap();
        assert!(verify_recurrence2(&a, &m).unwrap().all_passed());
        assert!(verify_cayley_hamilton2(&a, &m).unwrap().all_passed());
    }

    #[test]
    fn rank_and_dim_checks() {
        let a: SymTensor<ExactScalar> = random_symmetric(2, 3, 1, 3).unwrap();
        assert!(g_trace(&a, &unit(2)).is_err());
        let s: SymTensor<ExactScalar> = random_symmetric(3, 2, 1, 3).unwrap();
        assert!(matches!(det2(&s), Err(Error::UnsupportedRank { .. })));
    }
}
