//! Principal isotopes `A_{α,β}` with product `x ∘ y = α(x) β(y)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hurwitz::{coords_approx_eq, Algebra, Element};
use crate::linear::{similitude_check, LinMap, SimilitudeCert};
use crate::scalar::{Backend, PowerCoset, Scalar};
use crate::triality::{triality_defect, TrialityTriple};

#[derive(Clone, Debug, PartialEq)]
pub struct Isotope<S: Scalar> {
    alpha: LinMap<S>,
    beta: LinMap<S>,
}

/// Pair of determinant classes `(det α, det β)` in `k*/k*^e`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleSign<S> {
    pub alpha: PowerCoset<S>,
    pub beta: PowerCoset<S>,
}

#[derive(Clone, Debug)]
pub struct TransportResult<S: Scalar> {
    pub target: Isotope<S>,
    pub witness: LinMap<S>,
    pub triple: TrialityTriple<S>,
    /// Max relative defect of `φ(x ∘ y) = φ(x) ∘' φ(y)` on basis pairs.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct CompositionCert<S: Scalar> {
    pub alpha: SimilitudeCert<S>,
    pub beta: SimilitudeCert<S>,
    /// `μ(α) μ(β)`: the isotope composes with respect to this multiple of
    /// the algebra's norm.
    pub norm_scale: S,
}

impl<S: Scalar> Isotope<S> {
    pub fn new(alpha: LinMap<S>, beta: LinMap<S>) -> Result<Self> {
        if !alpha.algebra().same_as(beta.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        if !alpha.is_invertible() || !beta.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Isotope { alpha, beta })
    }

    /// The algebra itself, `A_{I,I}`.
    pub fn trivial(algebra: &Algebra<S>) -> Self {
        Isotope { alpha: LinMap::identity(algebra), beta: LinMap::identity(algebra) }
    }

    pub fn algebra(&self) -> &Algebra<S> {
        self.alpha.algebra()
    }

    pub fn alpha(&self) -> &LinMap<S> {
        &self.alpha
    }

    pub fn beta(&self) -> &LinMap<S> {
        &self.beta
    }

    pub fn mul(&self, x: &Element<S>, y: &Element<S>) -> Result<Element<S>> {
        self.alpha.try_apply(x)?.multiply(&self.beta.try_apply(y)?)
    }

    /// Identity element: exists iff `α = R_a⁻¹` and `β = L_b⁻¹`, and is then
    /// `b a`.
    pub fn find_identity(&self) -> Result<Element<S>> {
        let alg = self.algebra();
        let alpha_inv = self.alpha.inverse()?;
        let beta_inv = self.beta.inverse()?;
        let a = alpha_inv.image_of_one();
        if !alpha_inv.approx_eq(&LinMap::right(&a)) {
            return Err(Error::NotUnital(mismatch_message("alpha^-1", "right", &alpha_inv, &LinMap::right(&a))));
        }
        let b = beta_inv.image_of_one();
        if !beta_inv.approx_eq(&LinMap::left(&b)) {
            return Err(Error::NotUnital(mismatch_message("beta^-1", "left", &beta_inv, &LinMap::left(&b))));
        }
        if !a.is_invertible() || !b.is_invertible() {
            return Err(Error::NotUnital("multiplier element has zero norm".into()));
        }
        let u = &b * &a;
        let tol = alg.tolerance().residual;
        for j in 0..alg.dim() {
            let e = alg.basis(j);
            let left = self.mul(&u, &e)?;
            let right = self.mul(&e, &u)?;
            if !coords_approx_eq(left.coords(), e.coords(), tol) || !coords_approx_eq(right.coords(), e.coords(), tol) {
                return Err(Error::NotUnital(format!("b a fails to act as identity on e{j}")));
            }
        }
        Ok(u)
    }

    /// `ρ = n(u)⁻¹` for the identity `u`, so that `ρ n` is multiplicative
    /// for `∘`.
    pub fn unital_norm_scale(&self) -> Result<S> {
        let u = self.find_identity()?;
        if !u.is_invertible() {
            return Err(Error::IsotropicIdentity);
        }
        u.norm().checked_inv()
    }

    /// `(γ, δ) = (φ₁ α φ⁻¹, φ₂ β φ⁻¹)`, the isotope for which `φ` is an
    /// isomorphism `A_{α,β} → A_{γ,δ}`.
    pub fn transport(&self, phi: &LinMap<S>, triple: &TrialityTriple<S>) -> Result<TransportResult<S>> {
        let alg = self.algebra();
        if !triple.phi.approx_eq(phi) {
            return Err(Error::TrialityMismatch { residual: triple.phi.distance(phi) });
        }
        let cert = similitude_check(phi)?;
        if alg.dim() >= 4 && !cert.proper {
            return Err(Error::ImproperSimilitude);
        }
        let defect = triality_defect(&triple.phi, &triple.phi1, &triple.phi2);
        if defect > alg.tolerance().residual {
            return Err(Error::TrialityMismatch { residual: defect });
        }
        let phi_inv = phi.inverse()?;
        let gamma = &(&triple.phi1 * &self.alpha) * &phi_inv;
        let delta = &(&triple.phi2 * &self.beta) * &phi_inv;
        let target = Isotope::new(gamma, delta)?;
        let residual = isomorphism_defect(phi, self, &target);
        if residual > alg.tolerance().residual {
            return Err(Error::TrialityMismatch { residual });
        }
        Ok(TransportResult { target, witness: phi.clone(), triple: triple.clone(), residual })
    }

    /// `w ∈ N(A)*` with `α = R_w⁻¹ γ` and `β = L_w δ`, i.e. the two isotopes
    /// have literally the same multiplication.
    pub fn same_isotope(&self, other: &Isotope<S>) -> Result<Element<S>> {
        if !self.algebra().same_as(other.algebra()) {
            return Err(Error::AlgebraMismatch);
        }
        let m = &other.alpha * &self.alpha.inverse()?;
        let w = m.image_of_one();
        if !w.is_invertible() {
            return Err(Error::Distinct("candidate w has zero norm".into()));
        }
        if !m.approx_eq(&LinMap::right(&w)) {
            return Err(Error::Distinct("gamma alpha^-1 is not a right multiplication".into()));
        }
        let n = &self.beta * &other.beta.inverse()?;
        if !n.approx_eq(&LinMap::left(&w)) {
            return Err(Error::Distinct("beta delta^-1 is not the left multiplication by w".into()));
        }
        if let Some((i, j)) = w.nucleus_defect() {
            return Err(Error::Distinct(format!("w is not in the nucleus: (e{i} w) e{j} != e{i} (w e{j})")));
        }
        let alg = self.algebra();
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let (x, y) = (alg.basis(i), alg.basis(j));
                let p = self.mul(&x, &y)?;
                let q = other.mul(&x, &y)?;
                if !coords_approx_eq(p.coords(), q.coords(), alg.tolerance().residual) {
                    return Err(Error::Distinct(format!("products of e{i} and e{j} differ")));
                }
            }
        }
        Ok(w)
    }

    /// Classes of `(det α, det β)`: in `k*/k*^{l/2}` for exact scalars and
    /// by sign over the reals.
    pub fn double_sign(&self) -> Result<DoubleSign<S>> {
        let l = self.algebra().dim() as u32;
        let exponent = match S::BACKEND {
            Backend::Exact => (l / 2).max(1),
            Backend::Approx => l,
        };
        self.double_sign_with_exponent(exponent)
    }

    /// Determinant classes modulo `e`-th powers for an explicit `e`.
    pub fn double_sign_with_exponent(&self, exponent: u32) -> Result<DoubleSign<S>> {
        let alg = self.algebra();
        if alg.dim() < 2 {
            return Err(Error::Dim1);
        }
        if alg.is_split_binary() {
            return Err(Error::SplitBinaryAlgebra);
        }
        Ok(DoubleSign {
            alpha: self.alpha.determinant().coset_rep(exponent)?,
            beta: self.beta.determinant().coset_rep(exponent)?,
        })
    }

    /// Certifies that `A_{α,β}` is a composition algebra: both maps must be
    /// similitudes.
    pub fn is_composition(&self) -> Result<CompositionCert<S>> {
        let alpha = similitude_check(&self.alpha).map_err(|e| match e {
            Error::NotSimilitude { .. } => Error::NotComposition("alpha"),
            other => other,
        })?;
        let beta = similitude_check(&self.beta).map_err(|e| match e {
            Error::NotSimilitude { .. } => Error::NotComposition("beta"),
            other => other,
        })?;
        let norm_scale = alpha.multiplier.clone() * beta.multiplier.clone();
        let alg = self.algebra();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..8 {
            let x = alg.random_element(&mut rng);
            let y = alg.random_element(&mut rng);
            let n = |z: &Element<S>| norm_scale.clone() * z.norm();
            let lhs = n(&self.mul(&x, &y)?);
            let rhs = n(&x) * n(&y);
            if !lhs.approx_eq(&rhs, alg.tolerance().residual) {
                return Err(Error::SelfCheck("composition norm is not multiplicative".into()));
            }
        }
        Ok(CompositionCert { alpha, beta, norm_scale })
    }
}

fn mismatch_message<S: Scalar>(name: &str, kind: &str, m: &LinMap<S>, candidate: &LinMap<S>) -> String {
    let col = (0..m.dim()).find(|&j| m.matrix().column(j) != candidate.matrix().column(j)).unwrap_or(0);
    format!("{name} is not a {kind} multiplication (column {col} differs)")
}

/// Max relative defect of `φ(x ∘ y) = φ(x) ∘' φ(y)` over basis pairs.
pub fn isomorphism_defect<S: Scalar>(phi: &LinMap<S>, source: &Isotope<S>, target: &Isotope<S>) -> f64 {
    let alg = source.algebra();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 1.0;
    for i in 0..alg.dim() {
        for j in 0..alg.dim() {
            let (x, y) = (alg.basis(i), alg.basis(j));
            let lhs = phi.apply(&source.mul(&x, &y).expect("same algebra"));
            let rhs = target.mul(&phi.apply(&x), &phi.apply(&y)).expect("same algebra");
            for (a, b) in lhs.coords().iter().zip(rhs.coords()) {
                worst = worst.max((a.clone() - b.clone()).abs_f64());
                scale = scale.max(a.abs_f64());
            }
        }
    }
    worst / scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::HurwitzAlgebra;
    use crate::linear::matrix::Matrix;
    use crate::scalar::Rational;
    use crate::triality::triality_components;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn quaternions() -> Algebra<Rational> {
        HurwitzAlgebra::new(vec![q(-1), q(-1)]).unwrap()
    }

    fn octonions() -> Algebra<Rational> {
        HurwitzAlgebra::new(vec![q(-1), q(-1), q(-1)]).unwrap()
    }

    fn unital(a: &Element<Rational>, b: &Element<Rational>) -> Isotope<Rational> {
        Isotope::new(LinMap::right(a).inverse().unwrap(), LinMap::left(b).inverse().unwrap()).unwrap()
    }

    #[test]
    fn multiplication_examples() {
        let h = quaternions();
        let x = &h.basis(1) + &h.basis(2);
        let y = &h.basis(3) + &h.one();
        assert_eq!(Isotope::trivial(&h).mul(&x, &y).unwrap(), &x * &y);
        let iso = unital(&h.basis(1), &h.basis(2));
        // (e0 e1⁻¹)(e2⁻¹ e0) = (-e1)(-e2) = e3
        assert_eq!(iso.mul(&h.one(), &h.one()).unwrap(), h.basis(3));
        assert_eq!(iso.mul(&h.zero(), &y).unwrap(), h.zero());
    }

    #[test]
    fn identity_examples() {
        let h = quaternions();
        assert_eq!(Isotope::trivial(&h).find_identity().unwrap(), h.one());
        let iso = unital(&h.basis(1), &h.basis(2));
        let u = iso.find_identity().unwrap();
        assert_eq!(u, -&h.basis(3));
        for j in 0..4 {
            assert_eq!(iso.mul(&u, &h.basis(j)).unwrap(), h.basis(j));
        }
        let d = LinMap::new(&h, Matrix::diagonal(&[q(1), q(2), q(1), q(1)])).unwrap();
        let bad = Isotope::new(d, LinMap::identity(&h)).unwrap();
        assert!(matches!(bad.find_identity(), Err(Error::NotUnital(_))));
    }

    #[test]
    fn norm_scale_examples() {
        let h = quaternions();
        assert_eq!(Isotope::trivial(&h).unital_norm_scale().unwrap(), q(1));
        assert_eq!(unital(&h.basis(1), &h.basis(2)).unital_norm_scale().unwrap(), q(1));
        let iso = unital(&(&h.one() + &h.basis(1)), &h.one());
        assert_eq!(iso.find_identity().unwrap(), &h.one() + &h.basis(1));
        let rho = iso.unital_norm_scale().unwrap();
        assert_eq!(rho, Rational::new(1.into(), 2.into()));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = h.random_element(&mut rng);
            let y = h.random_element(&mut rng);
            let lhs = rho.clone() * iso.mul(&x, &y).unwrap().norm();
            assert_eq!(lhs, rho.clone() * x.norm() * rho.clone() * y.norm());
        }
    }

    #[test]
    fn transport_examples() {
        let h = quaternions();
        let trivial = Isotope::trivial(&h);
        let id = LinMap::identity(&h);
        let t = triality_components(&id, &similitude_check(&id).unwrap()).unwrap();
        assert_eq!(trivial.transport(&id, &t).unwrap().target, trivial);

        let l1 = LinMap::left(&h.basis(1));
        let triple = TrialityTriple::new(l1.clone(), l1.clone(), LinMap::identity(&h));
        let result = trivial.transport(&l1, &triple).unwrap();
        assert_eq!(result.target.alpha(), &LinMap::identity(&h));
        assert_eq!(result.target.beta(), &l1.inverse().unwrap());
        assert_eq!(result.residual, 0.0);
    }

    #[test]
    fn transport_of_a_homothety() {
        let h = quaternions();
        let rho = q(3);
        let scaled = Isotope::new(LinMap::scalar(&h, rho.clone()), LinMap::identity(&h)).unwrap();
        let phi = LinMap::scalar(&h, rho.clone());
        let t = triality_components(&phi, &similitude_check(&phi).unwrap()).unwrap();
        let target = scaled.transport(&phi, &t).unwrap().target;
        let ratio = target.alpha().ratio_to(&LinMap::identity(&h)).unwrap();
        let ratio2 = target.beta().ratio_to(&LinMap::identity(&h)).unwrap();
        assert_eq!(ratio * ratio2, q(1));
    }

    #[test]
    fn improper_transport_is_rejected() {
        let h = quaternions();
        let kappa = LinMap::conjugation(&h);
        let triple = TrialityTriple::new(kappa.clone(), kappa.clone(), kappa.clone());
        assert_eq!(Isotope::trivial(&h).transport(&kappa, &triple).unwrap_err(), Error::ImproperSimilitude);
    }

    #[test]
    fn same_isotope_examples() {
        let h = quaternions();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gamma = crate::linear::random::random_invertible(&h, &mut rng);
        let delta = crate::linear::random::random_invertible(&h, &mut rng);
        let i2 = Isotope::new(gamma.clone(), delta.clone()).unwrap();
        assert_eq!(i2.same_isotope(&i2).unwrap(), h.one());
        let e1 = h.basis(1);
        let i1 = Isotope::new(&LinMap::right(&e1).inverse().unwrap() * &gamma, &LinMap::left(&e1) * &delta).unwrap();
        assert_eq!(i1.same_isotope(&i2).unwrap(), e1);

        let o = octonions();
        let gamma = crate::linear::random::random_invertible(&o, &mut rng);
        let delta = crate::linear::random::random_invertible(&o, &mut rng);
        let e1 = o.basis(1);
        let i1 = Isotope::new(&LinMap::right(&e1).inverse().unwrap() * &gamma, &LinMap::left(&e1) * &delta).unwrap();
        let i2 = Isotope::new(gamma, delta).unwrap();
        assert!(matches!(i1.same_isotope(&i2), Err(Error::Distinct(_))));
        let differs =
            (0..8).any(|i| (0..8).any(|j| i1.mul(&o.basis(i), &o.basis(j)) != i2.mul(&o.basis(i), &o.basis(j))));
        assert!(differs);
    }

    #[test]
    fn double_sign_examples() {
        let h = quaternions();
        let one = PowerCoset { exponent: 2, representative: q(1) };
        let ds = Isotope::trivial(&h).double_sign().unwrap();
        assert_eq!(ds, DoubleSign { alpha: one.clone(), beta: one.clone() });
        let hf = h.to_approx();
        let kappa = Isotope::new(LinMap::conjugation(&hf), LinMap::identity(&hf)).unwrap();
        let ds = kappa.double_sign().unwrap();
        assert_eq!((ds.alpha.representative, ds.beta.representative), (-1.0, 1.0));
        let alpha = LinMap::new(&h, Matrix::diagonal(&[q(48), q(1), q(1), q(1)])).unwrap();
        let iso = Isotope::new(alpha, LinMap::identity(&h)).unwrap();
        assert_eq!(iso.double_sign().unwrap().alpha.representative, q(3));
        assert_eq!(iso.double_sign_with_exponent(4).unwrap().alpha.representative, q(3));
    }

    #[test]
    fn double_sign_refusals() {
        let k = HurwitzAlgebra::new(vec![]).unwrap();
        assert_eq!(Isotope::<Rational>::trivial(&k).double_sign().unwrap_err(), Error::Dim1);
        let k2 = HurwitzAlgebra::new(vec![q(1)]).unwrap();
        assert_eq!(Isotope::trivial(&k2).double_sign().unwrap_err(), Error::SplitBinaryAlgebra);
        let c = HurwitzAlgebra::new(vec![q(-1)]).unwrap();
        assert!(Isotope::trivial(&c).double_sign().is_ok());
    }

    /// Determinants modulo `l`-th powers are not preserved by transport over
    /// the rationals: `det L_a = n(a)^{l/2}` is only an `l/2`-th power.
    #[test]
    fn full_exponent_classes_are_not_invariant() {
        let h = quaternions();
        let trivial = Isotope::trivial(&h);
        let c = &h.one() + &h.basis(1);
        let phi = LinMap::left(&c);
        let t = triality_components(&phi, &similitude_check(&phi).unwrap()).unwrap();
        let target = trivial.transport(&phi, &t).unwrap().target;
        assert_eq!(target.alpha().determinant(), Rational::new(1.into(), 4.into()));
        assert_ne!(target.double_sign_with_exponent(4).unwrap(), trivial.double_sign_with_exponent(4).unwrap());
        assert_eq!(target.double_sign().unwrap(), trivial.double_sign().unwrap());
    }

    #[test]
    fn composition_examples() {
        let h = quaternions();
        let kappa = Isotope::new(LinMap::conjugation(&h), LinMap::identity(&h)).unwrap();
        assert_eq!(kappa.is_composition().unwrap().norm_scale, q(1));
        let d = LinMap::new(&h, Matrix::diagonal(&[q(2), q(1), q(1), q(1)])).unwrap();
        let bad = Isotope::new(d, LinMap::identity(&h)).unwrap();
        assert_eq!(bad.is_composition().unwrap_err(), Error::NotComposition("alpha"));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = h.random_invertible(&mut rng);
        let b = h.random_invertible(&mut rng);
        let iso = Isotope::new(LinMap::left(&a), LinMap::right(&b)).unwrap();
        assert_eq!(iso.is_composition().unwrap().norm_scale, a.norm() * b.norm());
    }
}
