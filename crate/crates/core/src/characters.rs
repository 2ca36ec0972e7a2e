//! Harish-Chandra character evaluation: topological Jordan decomposition,
//! Weyl discriminant, Kottwitz sign, the Delta_II factor with supplied
//! a-/chi-data, the character formula at topologically semisimple elements,
//! and the real-group two-term evaluator cross-checked against the Weyl
//! character formula.

use crate::cyclotomic::Cyc;
use crate::genericity::{ExtChar, TorusCharacterData};
use crate::local_field::{teichmuller_part, LocalField, LocalFieldElement, LocalFieldError};
use crate::matrix::Mat;
use crate::rat::rat_int;
use crate::yu::{embed_ext, normalizer_coset_order, TameEllipticPair};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharacterError {
    #[error("element is not regular")]
    NotRegular,
    #[error("element is not compact modulo the center")]
    NotCompactModCenter,
    #[error("element is not topologically semisimple modulo the center")]
    NotTopSemisimple,
    #[error("missing a-/chi-data for a symmetric orbit")]
    MissingOrbitData,
    #[error("|epsilon_L| must be 1")]
    BadEpsilon,
    #[error("{0}")]
    Local(#[from] LocalFieldError),
    #[error("{0}")]
    Yu(#[from] crate::yu::YuError),
    #[error("{0}")]
    Genericity(#[from] crate::genericity::GenericityError),
}

pub type Result<T> = std::result::Result<T, CharacterError>;

/// An element of an elliptic rank-one torus, carried by its coordinate in
/// the quadratic extension.
#[derive(Clone, Debug)]
pub struct ToralElement {
    pub coord: LocalFieldElement,
}

impl ToralElement {
    pub fn new(coord: LocalFieldElement) -> ToralElement {
        ToralElement { coord }
    }

    /// alpha(gamma) = s / sigma(s) for the rank-one elliptic tori.
    pub fn alpha_value(&self) -> Result<LocalFieldElement> {
        let s = &self.coord;
        let inv = s
            .conjugate()
            .inv()
            .map_err(|_| CharacterError::NotRegular)?;
        Ok(s.mul_ref(&inv))
    }

    /// Regular iff alpha(gamma) != 1, i.e. the skew part of s is nonzero.
    pub fn is_regular(&self) -> bool {
        let skew = self.coord.sub_ref(&self.coord.conjugate());
        match skew.val() {
            Ok(Some(_)) => true,
            Ok(None) => false,
            Err(_) => !skew.is_exact_zero(),
        }
    }

    pub fn matrix(&self) -> Mat<LocalFieldElement> {
        embed_ext(&self.coord)
    }
}

/// The topological Jordan decomposition gamma = gamma_0 gamma_{0+} of a
/// compact element, computed coordinatewise by the Teichmueller projection
/// and cross-checked against the matrix-level q-power iteration.
pub fn topological_jordan(
    gamma: &ToralElement,
    k: i64,
) -> Result<(LocalFieldElement, LocalFieldElement)> {
    let s = &gamma.coord;
    let v = s.val()?;
    if v != Some(rat_int(0)) {
        return Err(CharacterError::NotCompactModCenter);
    }
    let ext = s.field;
    let gamma0 = teichmuller_part(s, k).map_err(CharacterError::Local)?;
    let gamma_plus = s.mul_ref(&gamma0.inv()?);
    // the parts commute and recompose (exact at the working window)
    let recomposed = gamma0.mul_ref(&gamma_plus);
    if !recomposed
        .sub_ref(s)
        .certify_val_at_least(k)
        .unwrap_or(false)
    {
        return Err(CharacterError::NotCompactModCenter);
    }
    // second path: iterate the embedded matrix g -> g^q
    let q = ext.q();
    let m = gamma.matrix();
    let mut cur = truncate_matrix(&m, k * ext.e as i64);
    for _ in 0..(k + 2) {
        cur = matrix_pow_mod(&cur, q, k * ext.e as i64);
    }
    let m0 = embed_ext(&gamma0);
    for i in 0..2 {
        for j in 0..2 {
            if !cur[(i, j)]
                .sub_ref(&m0[(i, j)])
                .certify_val_at_least(k)
                .unwrap_or(false)
            {
                return Err(CharacterError::NotCompactModCenter);
            }
        }
    }
    Ok((gamma0, gamma_plus))
}

/// Topological Jordan decomposition of a compact 2x2 matrix over F by the
/// q-power iteration: gamma_0 = lim gamma^{q^n} mod pi^k, gamma_{0+} the
/// topologically unipotent complement; the factors are verified to commute
/// and recompose at the working window.
pub fn topological_jordan_matrix(
    g: &Mat<LocalFieldElement>,
    q: u64,
    k: i64,
) -> Result<(Mat<LocalFieldElement>, Mat<LocalFieldElement>)> {
    // compactness: integral entries and unit determinant
    for entry in &g.data {
        if !entry.certify_val_at_least(0).unwrap_or(false) {
            return Err(CharacterError::NotCompactModCenter);
        }
    }
    if g.det().val()? != Some(rat_int(0)) {
        return Err(CharacterError::NotCompactModCenter);
    }
    let mut cur = truncate_matrix(g, k);
    for _ in 0..(k + 2) {
        cur = matrix_pow_mod(&cur, q, k);
    }
    let gamma0 = cur;
    let g0_inv = gamma0.inverse().ok_or(CharacterError::NotCompactModCenter)?;
    let gamma_plus = truncate_matrix(&g0_inv.mul(g), k);
    // the factors commute and recompose
    let ab = gamma0.mul(&gamma_plus);
    let ba = gamma_plus.mul(&gamma0);
    for i in 0..2 {
        for j in 0..2 {
            if !ab[(i, j)]
                .sub_ref(&ba[(i, j)])
                .certify_val_at_least(k - 1)
                .unwrap_or(false)
                || !ab[(i, j)]
                    .sub_ref(&g[(i, j)])
                    .certify_val_at_least(k - 1)
                    .unwrap_or(false)
            {
                return Err(CharacterError::NotCompactModCenter);
            }
        }
    }
    Ok((gamma0, gamma_plus))
}

fn truncate_matrix(m: &Mat<LocalFieldElement>, k: i64) -> Mat<LocalFieldElement> {
    let data = m.data.iter().map(|x| x.truncate(k)).collect();
    Mat {
        rows: m.rows,
        cols: m.cols,
        data,
    }
}

fn matrix_pow_mod(m: &Mat<LocalFieldElement>, e: u64, k: i64) -> Mat<LocalFieldElement> {
    let mut acc = Mat::identity_like(m.rows, &m.sample().field.one().truncate(k));
    let mut base = truncate_matrix(m, k);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = truncate_matrix(&acc.mul(&base), k);
        }
        base = truncate_matrix(&base.mul(&base), k);
        e >>= 1;
    }
    acc
}

/// Is gamma_{0+} central, i.e. does it lie in the base field (scalar part of
/// the torus)? For SL2 norm-one tori centrality means +-1.
pub fn topologically_semisimple_mod_center(gamma: &ToralElement, k: i64) -> Result<bool> {
    let (_, plus) = topological_jordan(gamma, k)?;
    let skew = plus.sub_ref(&plus.conjugate());
    Ok(skew.certify_val_at_least(k.max(1)).unwrap_or(false))
}

/// D(gamma)^{-1/2} and friends: a positive-real power q^{num/2}, tracked
/// symbolically.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct QPowerHalf {
    pub q: u64,
    /// exponent numerator: the value is q^{num/2}.
    pub num: i64,
}

impl QPowerHalf {
    pub fn to_f64(&self) -> f64 {
        (self.q as f64).powf(self.num as f64 / 2.0)
    }
}

impl std::fmt::Display for QPowerHalf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}^({}/2)", self.q, self.num)
    }
}

/// Weyl discriminant D(gamma) = |prod_alpha (1 - alpha(gamma))| as a power
/// of q (the normalized absolute value |x| = q^{-val x}).
pub fn weyl_discriminant(gamma: &ToralElement) -> Result<QPowerHalf> {
    if !gamma.is_regular() {
        return Err(CharacterError::NotRegular);
    }
    let ext = gamma.coord.field;
    let a = gamma.alpha_value()?;
    let one = ext.one();
    let v1 = a.sub_ref(&one).val()?.ok_or(CharacterError::NotRegular)?;
    let ainv = a.inv()?;
    let v2 = ainv
        .sub_ref(&one)
        .val()?
        .ok_or(CharacterError::NotRegular)?;
    // D = q^{-(v1 + v2)}; the q here is the residue size of the BASE field
    let total = v1 + v2;
    let denom = *total.denom();
    assert!(denom == 1 || denom == 2, "valuations live in (1/e) Z");
    let num2 = (total * rat_int(2)).to_integer();
    Ok(QPowerHalf {
        q: ext.p,
        num: -num2,
    })
}

/// Kottwitz sign e(G) = (-1)^{r(G_qs) - r(G)}.
pub fn kottwitz_sign(rank_quasisplit: i64, rank: i64) -> i64 {
    if (rank_quasisplit - rank).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// a-data and chi-data for the symmetric orbit {alpha, -alpha} of a rank-one
/// elliptic torus.
#[derive(Clone, Debug)]
pub struct ChiData {
    /// a_alpha, an element of E^x.
    pub a_alpha: LocalFieldElement,
    /// chi''_alpha, a character of E^x.
    pub chi: ExtChar,
}

impl ChiData {
    /// The documented default for the unramified elliptic torus: a trace-zero
    /// unit and the unramified quadratic character.
    pub fn default_unramified(ext: LocalField) -> ChiData {
        ChiData {
            a_alpha: ext.w_gen(),
            chi: ExtChar::unramified_quadratic_char(ext),
        }
    }

    pub fn trivial(ext: LocalField) -> ChiData {
        ChiData {
            a_alpha: ext.one(),
            chi: ExtChar::trivial(ext),
        }
    }
}

/// Delta_II^abs[a, chi''](gamma) = chi''((alpha(gamma) - 1)/a_alpha) over the
/// symmetric orbits (one orbit in rank one).
pub fn delta_ii(gamma: &ToralElement, data: &ChiData) -> Result<Cyc> {
    if !gamma.is_regular() {
        return Err(CharacterError::NotRegular);
    }
    let a = gamma.alpha_value()?;
    let one = gamma.coord.field.one();
    let arg = a.sub_ref(&one).mul_ref(&data.a_alpha.inv()?);
    let value = data.chi.eval(&arg)?;
    if !value.is_unit_modulus() {
        return Err(CharacterError::BadEpsilon);
    }
    Ok(value)
}

/// The exact output of the character formula at a topologically semisimple
/// element: e(G) eps_L q^{num/2} sum_w Delta(w gamma) theta(w gamma).
#[derive(Clone, Debug)]
pub struct CharacterValue {
    pub kottwitz: i64,
    pub eps_l: Cyc,
    pub d_half: QPowerHalf,
    pub summands: Vec<Cyc>,
    pub sum: Cyc,
}

impl CharacterValue {
    pub fn to_complex_f64(&self) -> (f64, f64) {
        let scale = self.kottwitz as f64 * self.d_half.to_f64();
        let (er, ei) = self.eps_l.to_complex_f64();
        let (sr, si) = self.sum.to_complex_f64();
        // (er + i ei)(sr + i si) * scale
        (scale * (er * sr - ei * si), scale * (er * si + ei * sr))
    }

    /// A canonical exact rendering; stability across precisions is literal
    /// string equality of this form.
    pub fn symbolic(&self) -> String {
        format!("{} * eps * {} * ({})", self.kottwitz, self.d_half, self.sum)
    }
}

/// Evaluate the character formula of a regular supercuspidal at a regular,
/// topologically semisimple (mod center) element gamma of S(F).
pub fn character_at_ts(
    pair: &TameEllipticPair,
    gamma: &ToralElement,
    data: &ChiData,
    eps_l: Cyc,
) -> Result<CharacterValue> {
    if !eps_l.is_unit_modulus() {
        return Err(CharacterError::BadEpsilon);
    }
    if !gamma.is_regular() {
        return Err(CharacterError::NotRegular);
    }
    let k = gamma.coord.field.precision - 2;
    if !topologically_semisimple_mod_center(gamma, k.max(2))? {
        return Err(CharacterError::NotTopSemisimple);
    }
    let theta = &pair.theta;
    // coset representatives of N(S)(F)/S(F): identity and (optionally) the
    // Galois twist
    let (order, _witness) = normalizer_coset_order(pair)?;
    let d_half = {
        let d = weyl_discriminant(gamma)?;
        // D^{-1/2}: negate the numerator
        QPowerHalf {
            q: d.q,
            num: -d.num,
        }
    };
    let mut summands = Vec::new();
    let mut sum = Cyc::zero();
    for w in 0..order {
        let conj_gamma = if w == 0 {
            gamma.clone()
        } else {
            ToralElement::new(gamma.coord.conjugate())
        };
        let delta = delta_ii(&conj_gamma, data)?;
        let theta_val = eval_theta(theta, &conj_gamma)?;
        let term = delta * theta_val;
        summands.push(term.clone());
        sum += term;
    }
    // Kottwitz sign: SL2 and GL2 are quasi-split, so e(G) = +1
    let kottwitz = kottwitz_sign(1, 1);
    Ok(CharacterValue {
        kottwitz,
        eps_l,
        d_half,
        summands,
        sum,
    })
}

fn eval_theta(theta: &TorusCharacterData, gamma: &ToralElement) -> Result<Cyc> {
    Ok(theta.eval_ext(&gamma.coord)?)
}

/// The real-group two-term character, floating-point mode:
/// (-1) sum_w theta(w gamma)/prod(1 - alpha(w gamma)^{-1}) for SL2(R)-type
/// data with theta(rot phi) = e^{i n phi} and alpha(rot phi) = e^{2 i phi}.
pub fn real_ds_character(n: u32, phi: f64) -> Result<f64> {
    if phi.sin().abs() < 1e-12 {
        return Err(CharacterError::NotRegular);
    }
    let num = |w: f64| {
        // theta(w gamma w^{-1}) = e^{i n w phi}, denominators 1 - e^{-2 i w phi}
        let t = (n as f64) * w * phi;
        let d = -2.0 * w * phi;
        let theta = (t.cos(), t.sin());
        let den = (1.0 - d.cos(), -d.sin());
        // theta / den
        let norm = den.0 * den.0 + den.1 * den.1;
        (
            (theta.0 * den.0 + theta.1 * den.1) / norm,
            (theta.1 * den.0 - theta.0 * den.1) / norm,
        )
    };
    let (r1, i1) = num(1.0);
    let (r2, i2) = num(-1.0);
    let re = -(r1 + r2);
    let im = -(i1 + i2);
    assert!(im.abs() < 1e-9, "character value must be real");
    Ok(re)
}

/// Exact cyclotomic mode at the rational angle phi = 2 pi a / b.
pub fn real_ds_character_cyc(n: u32, a: i64, b: u64) -> Result<Cyc> {
    let z = Cyc::zeta(b, a); // e^{i phi}
    let one = Cyc::one();
    // regularity: e^{2 i phi} != 1
    if z.clone() * z.clone() == one {
        return Err(CharacterError::NotRegular);
    }
    let term = |sign: i64| -> Cyc {
        let theta = Cyc::zeta(b, sign * (n as i64) * a);
        let den = one.clone() - Cyc::zeta(b, -2 * sign * a);
        theta * den.inv().expect("regular element")
    };
    Ok(-(term(1) + term(-1)))
}

/// Weyl character formula oracle: trace of Sym^n(std) of SU(2) at rot(phi),
/// phi = 2 pi a / b, exactly: sum_{j=0..n} e^{i (n - 2j) phi}.
pub fn weyl_character_sym(n: u32, a: i64, b: u64) -> Cyc {
    let mut s = Cyc::zero();
    for j in 0..=n {
        s += Cyc::zeta(b, (n as i64 - 2 * j as i64) * a);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building::GroupKind;
    use crate::fq::Fq;
    use crate::genericity::NormOneChar;

    fn unramified_pair_q7() -> (TameEllipticPair, LocalField) {
        let field = LocalField::qp(7, 6);
        let ext = LocalField::unramified_quadratic(7, 6);
        let theta = TorusCharacterData::NormOne(NormOneChar {
            ext,
            tame_exp: 1,
            wild_coeff: None,
        });
        (
            TameEllipticPair {
                field,
                theta,
                ambient: GroupKind::Sl(2),
            },
            ext,
        )
    }

    /// A norm-one element of exact order 8 in the unramified quadratic
    /// extension of Q_7 (mu_8 = the norm-one Teichmueller part).
    fn order_eight_gamma(ext: LocalField) -> ToralElement {
        let g = Fq::generator(7, 2, ext.nonres);
        let zeta0 = g.pow(6); // order 8 in F_49^x
        let lift = LocalFieldElement::from_residue(ext, zeta0);
        let t = teichmuller_part(&lift, ext.precision).unwrap();
        ToralElement::new(t)
    }

    #[test]
    fn jordan_decomposition_examples() {
        let ext = LocalField::unramified_quadratic(7, 6);
        // topologically unipotent: gamma_0 = 1
        let u = ToralElement::new(ext.int(1).add_ref(&ext.w_gen().shift_pi(1)));
        let (g0, gp) = topological_jordan(&u, 4).unwrap();
        assert!(g0.sub_ref(&ext.one()).certify_val_at_least(4).unwrap());
        assert!(gp.sub_ref(&u.coord).certify_val_at_least(4).unwrap());
        // gamma = 3 as a unit of Q_7 inside the extension: gamma_0 = 31 mod 49
        let three = ToralElement::new(ext.int(3));
        let (g0, _) = topological_jordan(&three, 2).unwrap();
        assert!(g0.sub_ref(&ext.int(31)).certify_val_at_least(2).unwrap());
        // finite prime-to-p order: (gamma, 1)
        let zeta = order_eight_gamma(ext);
        let (g0, gp) = topological_jordan(&zeta, 4).unwrap();
        assert!(g0.sub_ref(&zeta.coord).certify_val_at_least(4).unwrap());
        assert!(gp.sub_ref(&ext.one()).certify_val_at_least(4).unwrap());
        // gamma_0 passes the prime-to-p-order test
        let q2 = ext.q() * ext.q();
        let pw = g0.pow_mod(q2 - 1, 4);
        assert!(pw
            .sub_ref(&ext.one().truncate(4))
            .certify_val_at_least(4)
            .unwrap());
    }

    #[test]
    fn weyl_discriminants() {
        let ext = LocalField::unramified_quadratic(7, 6);
        // diag(2, 1/2)-analogue: s = 2 viewed in E is NOT regular (skew 0);
        // instead take a regular unit with unit skew part
        let s = ext.int(2).add_ref(&ext.w_gen());
        let g = ToralElement::new(s);
        let d = weyl_discriminant(&g).unwrap();
        assert_eq!(d.num, 0, "unit discriminant gives D = 1");
        // 1-unit with skew at level 1: val(1 - alpha) = 1 each, D = q^{-2}
        let s = ext.one().add_ref(&ext.w_gen().shift_pi(1));
        let d = weyl_discriminant(&ToralElement::new(s)).unwrap();
        assert_eq!(d.num, -4, "q^{{-2}} = q^{{-4/2}}");
        // D(gamma) = D(gamma^{-1}) and D is conjugation-invariant
        let s = ext
            .int(2)
            .add_ref(&ext.w_gen())
            .mul_ref(&ext.one().add_ref(&ext.w_gen().shift_pi(1)));
        let g = ToralElement::new(s.clone());
        let ginv = ToralElement::new(s.inv().unwrap());
        let gconj = ToralElement::new(s.conjugate());
        let d = weyl_discriminant(&g).unwrap();
        assert_eq!(d, weyl_discriminant(&ginv).unwrap());
        assert_eq!(d, weyl_discriminant(&gconj).unwrap());
        // central elements are not regular
        let c = ToralElement::new(ext.int(2));
        assert!(matches!(
            weyl_discriminant(&c),
            Err(CharacterError::NotRegular)
        ));
    }

    #[test]
    fn kottwitz_signs() {
        assert_eq!(kottwitz_sign(1, 1), 1);
        assert_eq!(kottwitz_sign(1, 0), -1);
        assert_eq!(kottwitz_sign(2, 0), 1);
    }

    #[test]
    fn delta_ii_values() {
        let ext = LocalField::unramified_quadratic(7, 6);
        let data = ChiData::default_unramified(ext);
        // val(alpha(gamma) - 1) = 0: chi'' unramified quadratic gives +1
        let g = order_eight_gamma(ext);
        let v = delta_ii(&g, &data).unwrap();
        assert_eq!(v, Cyc::one());
        // val(alpha(gamma) - 1) = 1: parity flips to -1
        let s = ext.one().add_ref(&ext.w_gen().shift_pi(1));
        let v = delta_ii(&ToralElement::new(s), &data).unwrap();
        assert_eq!(v, Cyc::from_int(-1));
        // trivial chi-data: always 1
        let triv = ChiData::trivial(ext);
        assert_eq!(delta_ii(&g, &triv).unwrap(), Cyc::one());
    }

    #[test]
    fn character_formula_two_summands() {
        let (pair, ext) = unramified_pair_q7();
        let gamma = order_eight_gamma(ext);
        let data = ChiData::default_unramified(ext);
        let val = character_at_ts(&pair, &gamma, &data, Cyc::one()).unwrap();
        assert_eq!(val.summands.len(), 2, "|N(S)(F)/S(F)| = 2 summands");
        assert_eq!(val.d_half.num, 0);
        // Weyl invariance: evaluating at the conjugate re-indexes the sum
        let conj = ToralElement::new(gamma.coord.conjugate());
        let val2 = character_at_ts(&pair, &conj, &data, Cyc::one()).unwrap();
        assert_eq!(val.sum, val2.sum);
        assert_eq!(val.symbolic(), val2.symbolic());
        // theta(gamma) + theta(gamma^{-1}) with theta = tame exponent 1:
        // gamma has order 8, theta(gamma) = zeta_8, sum = zeta_8 + zeta_8^{-1}
        let expected = Cyc::zeta(8, 1) + Cyc::zeta(8, -1);
        assert_eq!(val.sum, expected);
    }

    #[test]
    fn character_stability_across_precisions() {
        let mut symbolic = Vec::new();
        for prec in [4i64, 5, 6] {
            let field = LocalField::qp(7, prec);
            let ext = LocalField::unramified_quadratic(7, prec + 1);
            let theta = TorusCharacterData::NormOne(NormOneChar {
                ext,
                tame_exp: 1,
                wild_coeff: None,
            });
            let pair = TameEllipticPair {
                field,
                theta,
                ambient: GroupKind::Sl(2),
            };
            let gamma = order_eight_gamma(ext);
            let data = ChiData::default_unramified(ext);
            let val = character_at_ts(&pair, &gamma, &data, Cyc::one()).unwrap();
            symbolic.push(val.symbolic());
        }
        assert!(symbolic.windows(2).all(|w| w[0] == w[1]), "{symbolic:?}");
    }

    #[test]
    fn nontop_semisimple_rejected() {
        let (pair, ext) = unramified_pair_q7();
        // gamma with a noncentral topologically unipotent part
        let zeta = order_eight_gamma(ext).coord;
        let gamma = ToralElement::new(zeta.mul_ref(&ext.one().add_ref(&ext.w_gen().shift_pi(1))));
        let data = ChiData::default_unramified(ext);
        let err = character_at_ts(&pair, &gamma, &data, Cyc::one());
        assert!(matches!(err, Err(CharacterError::NotTopSemisimple)));
        // but a central unipotent part is fine
        let gamma2 = ToralElement::new(zeta.mul_ref(&ext.int(8)));
        assert!(character_at_ts(&pair, &gamma2, &data, Cyc::one()).is_ok());
        // |eps| = 1 enforced
        let bad = character_at_ts(&pair, &order_eight_gamma(ext), &data, Cyc::from_int(2));
        assert!(matches!(bad, Err(CharacterError::BadEpsilon)));
    }

    #[test]
    fn real_character_examples() {
        // n = 1, phi = pi/2: -sin(pi)/sin(pi/2) = 0
        let v = real_ds_character(1, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(v.abs() < 1e-10);
        // n = 2, phi = pi/2: -sin(3 pi/2)/sin(pi/2) = 1
        let v = real_ds_character(2, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
        assert!(real_ds_character(3, 0.0).is_err());
    }

    #[test]
    fn real_character_matches_weyl_formula() {
        // floating mode
        for n in 0..=10u32 {
            for k in 1..20 {
                let phi = (k as f64) * 0.31;
                if phi.sin().abs() < 1e-6 {
                    continue;
                }
                let lhs = real_ds_character(n, phi).unwrap();
                let rhs = -((n as f64 + 1.0) * phi).sin() / phi.sin();
                assert!((lhs - rhs).abs() < 1e-10, "n={n} phi={phi}");
            }
        }
        // exact mode at rational angles: real_ds + trace Sym^n = 0
        for n in 0..=6u32 {
            for (a, b) in [(1i64, 5u64), (1, 7), (2, 7), (3, 8), (1, 12)] {
                let lhs = real_ds_character_cyc(n, a, b).unwrap();
                let tr = weyl_character_sym(n, a, b);
                assert!((lhs + tr).is_zero(), "n={n} angle=2pi*{a}/{b}");
            }
        }
    }
    #[test]
    fn weyl_fixed_theta_collapses_the_sum() {
        // theta fixed by the Weyl twist: both summands coincide and
        // Theta = |W_S| . Delta . theta(gamma) (up to the leading factors)
        let field = LocalField::qp(7, 6);
        let ext = LocalField::unramified_quadratic(7, 6);
        // tame exponent divisible by q+1 = 8 is sigma-fixed on mu_8 ... use
        // the exponent 4 whose values on gamma and sigma(gamma) = gamma^{-1}
        // agree (zeta_8^{4k} = +-1 is inversion-invariant)
        let theta = TorusCharacterData::NormOne(NormOneChar {
            ext,
            tame_exp: 4,
            wild_coeff: None,
        });
        let pair = TameEllipticPair {
            field,
            theta,
            ambient: GroupKind::Sl(2),
        };
        let g = Fq::generator(7, 2, ext.nonres);
        let lift = LocalFieldElement::from_residue(ext, g.pow(6));
        let gamma = ToralElement::new(teichmuller_part(&lift, ext.precision).unwrap());
        let data = ChiData::default_unramified(ext);
        let val = character_at_ts(&pair, &gamma, &data, Cyc::one()).unwrap();
        assert_eq!(val.summands.len(), 2);
        assert_eq!(val.summands[0], val.summands[1]);
        let single = val.summands[0].clone();
        assert_eq!(val.sum, single.clone() + single);
    }
    #[test]
    fn matrix_jordan_decomposition() {
        use crate::yu::embed_ext;
        let f = LocalField::qp(7, 6);
        // a compact SL2 matrix: embedded order-8 element times a unipotent
        let ext = LocalField::unramified_quadratic(7, 6);
        let zeta = order_eight_gamma(ext).coord;
        let m = embed_ext(&zeta.mul_ref(&ext.int(8)));
        let (g0, gp) = topological_jordan_matrix(&m, 7, 4).unwrap();
        // gamma_0 is the embedded Teichmueller part, gamma_{0+} is 8-ish
        let expected0 = embed_ext(&zeta);
        for i in 0..2 {
            for j in 0..2 {
                assert!(g0[(i, j)]
                    .sub_ref(&expected0[(i, j)])
                    .certify_val_at_least(3)
                    .unwrap());
            }
        }
        let scalar8 = Mat::identity_like(2, &f.one()).scale(&f.int(8));
        for i in 0..2 {
            for j in 0..2 {
                assert!(gp[(i, j)]
                    .sub_ref(&scalar8[(i, j)])
                    .certify_val_at_least(3)
                    .unwrap());
            }
        }
        // a non-compact matrix is rejected
        let bad = Mat::from_rows(vec![vec![f.int(7), f.zero()], vec![f.zero(), f.int(1)]]);
        assert!(topological_jordan_matrix(&bad, 7, 3).is_err());
    }

}
