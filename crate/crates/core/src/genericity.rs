//! Generic elements of the dual Lie algebra and generic characters of tori:
//! conditions GE0, GE1, GE2 and character depth.
//!
//! Torus characters are carried by explicit level data: a tame part on the
//! Teichmueller units, a wild part given by pairing the p-adic logarithm with
//! a dual coefficient, and a value on the uniformizer. Everything evaluates
//! to exact cyclotomic numbers.

use crate::building::TorusDescriptor;
use crate::cyclotomic::Cyc;
use crate::fq::{dlog, Fq};
use crate::local_field::{
    teichmuller_part, AdditiveCharacter, LocalField, LocalFieldElement, LocalFieldError,
};
use crate::rat::{rat_int, Rat};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenericityError {
    #[error("GE0 failed: {0}")]
    GE0Failed(String),
    #[error("depth mismatch: character depth {0} but r = {1}")]
    DepthMismatch(Rat, Rat),
    #[error("{0}")]
    Local(#[from] LocalFieldError),
    #[error("unsupported torus for this operation")]
    UnsupportedTorus,
}

pub type Result<T> = std::result::Result<T, GenericityError>;

/// A multiplicative character of E^x (E = F allowed), split into the value
/// on the uniformizer, a tame exponent on the Teichmueller units, and a wild
/// coefficient c pairing with log: chi(1+y) = phi(Tr_{E/F}(c log(1+y))).
#[derive(Clone, Debug)]
pub struct ExtChar {
    pub ext: LocalField,
    pub on_uniformizer: Cyc,
    pub tame_exp: i64,
    pub wild_coeff: Option<LocalFieldElement>,
}

impl ExtChar {
    pub fn depth_one(ext: LocalField) -> ExtChar {
        // wild coefficient of valuation -1 in pi_F units
        let c = ext.one().shift_pi(-(ext.e as i64));
        ExtChar {
            ext,
            on_uniformizer: Cyc::one(),
            tame_exp: 0,
            wild_coeff: Some(c),
        }
    }

    /// The unramified quadratic character: trivial on units, -1 on the
    /// uniformizer (values depend only on the parity of the valuation).
    pub fn unramified_quadratic_char(ext: LocalField) -> ExtChar {
        ExtChar {
            ext,
            on_uniformizer: Cyc::from_int(-1),
            tame_exp: 0,
            wild_coeff: None,
        }
    }

    pub fn trivial(ext: LocalField) -> ExtChar {
        ExtChar {
            ext,
            on_uniformizer: Cyc::one(),
            tame_exp: 0,
            wild_coeff: None,
        }
    }

    fn tame_generator(&self) -> Fq {
        if self.ext.f == 1 {
            Fq::generator(self.ext.p, 1, 0)
        } else {
            Fq::generator(self.ext.p, 2, self.ext.nonres)
        }
    }

    pub fn eval(&self, s: &LocalFieldElement) -> Result<Cyc> {
        assert!(s.field.same_field(&self.ext));
        let v = s.val()?.ok_or_else(|| LocalFieldError::NotAUnit)?;
        let ve = (v * rat_int(self.ext.e as i64)).to_integer();
        let unit = s.shift_pi(-ve);
        let prec = self.ext.precision;
        let teich = teichmuller_part(&unit, prec)?;
        let tgen = self.tame_generator();
        let k = dlog(&tgen, &teich.residue()?).expect("unit residue has a dlog");
        let qm1 = tgen.q() - 1;
        let mut out = Cyc::one();
        for _ in 0..ve.unsigned_abs() {
            out = if ve >= 0 {
                out * self.on_uniformizer.clone()
            } else {
                out * self.on_uniformizer.inv().unwrap()
            };
        }
        out = out * Cyc::zeta(qm1, self.tame_exp * k as i64);
        if let Some(c) = &self.wild_coeff {
            let principal = unit.mul_ref(&teich.inv()?);
            let window = prec;
            let l = principal.log_1unit(window)?;
            let paired = c.mul_ref(&l).trace_to_base();
            let phi = AdditiveCharacter::new(paired.field);
            out = out * phi.eval(&paired)?;
        }
        Ok(out)
    }

    /// Depth of the wild part: -val(values window) read from the coefficient.
    pub fn wild_depth(&self) -> Rat {
        match &self.wild_coeff {
            None => rat_int(0),
            Some(c) => {
                // pairing Tr(c log(1+y)) is nontrivial at level j iff
                // j + val(c) + (trace shift) <= 0; depth = -val_F(c) minus the
                // trace dilation for ramified extensions.
                let v = c.val().unwrap().unwrap_or(rat_int(0));
                -v
            }
        }
    }
}

/// A character of the norm-one torus of a quadratic extension E/F, with a
/// sign on the tame part mu_{q+1} (resp. {+-1} when ramified) and a wild
/// coefficient pairing through the logarithm (which lands in the trace-zero
/// line).
#[derive(Clone, Debug)]
pub struct NormOneChar {
    pub ext: LocalField,
    /// exponent on the tame norm-one generator
    pub tame_exp: i64,
    pub wild_coeff: Option<LocalFieldElement>,
}

impl NormOneChar {
    /// The tame norm-one subgroup order: q+1 unramified, 2 ramified.
    pub fn tame_order(&self) -> u64 {
        if self.ext.e == 1 {
            self.ext.p + 1
        } else {
            2
        }
    }

    /// Generator of the tame norm-one part as a residue element.
    fn tame_generator(&self) -> Fq {
        if self.ext.e == 1 {
            let g = Fq::generator(self.ext.p, 2, self.ext.nonres);
            g.pow(self.ext.p - 1)
        } else {
            Fq::prime(self.ext.p, -1)
        }
    }

    pub fn eval(&self, s: &LocalFieldElement) -> Result<Cyc> {
        assert!(s.field.same_field(&self.ext));
        // norm-one elements are units
        if s.val()? != Some(rat_int(0)) {
            return Err(GenericityError::Local(LocalFieldError::NotAUnit));
        }
        let prec = self.ext.precision;
        let teich = teichmuller_part(s, prec)?;
        let res = teich.residue()?;
        let tgen = self.tame_generator();
        let order = self.tame_order();
        let mut k = 0u64;
        let mut x = res.one_like();
        while x != res {
            x = x.mul(&tgen);
            k += 1;
            assert!(k <= order, "tame part is not norm-one");
        }
        let mut out = Cyc::zeta(order, self.tame_exp * k as i64);
        if let Some(c) = &self.wild_coeff {
            let principal = s.mul_ref(&teich.inv()?);
            let l = principal.log_1unit(prec)?;
            let paired = c.mul_ref(&l).trace_to_base();
            let phi = AdditiveCharacter::new(paired.field);
            out = out * phi.eval(&paired)?;
        }
        Ok(out)
    }

    pub fn wild_depth(&self) -> Rat {
        match &self.wild_coeff {
            None => rat_int(0),
            Some(c) => -c.val().unwrap().unwrap_or(rat_int(0)),
        }
    }
}

/// Character data of a supported torus.
#[derive(Clone, Debug)]
pub enum TorusCharacterData {
    /// theta(diag(t_1..t_n)) = psi(prod t_i^{m_i}) on the split diagonal torus.
    SplitMonomial { psi: ExtChar, exponents: Vec<i64> },
    /// Character of the norm-one torus of a quadratic extension.
    NormOne(NormOneChar),
    /// Character of E^x for the induced (elliptic-in-GL2) torus.
    Induced(ExtChar),
}

impl TorusCharacterData {
    pub fn torus(&self) -> TorusDescriptor {
        match self {
            TorusCharacterData::SplitMonomial { exponents, .. } => TorusDescriptor::DiagonalSplit {
                n: exponents.len(),
                sl: false,
            },
            TorusCharacterData::NormOne(c) => TorusDescriptor::NormOne { ext: c.ext },
            TorusCharacterData::Induced(c) => TorusDescriptor::InducedQuadratic { ext: c.ext },
        }
    }

    pub fn eval_diag(&self, entries: &[LocalFieldElement]) -> Result<Cyc> {
        match self {
            TorusCharacterData::SplitMonomial { psi, exponents } => {
                assert_eq!(entries.len(), exponents.len());
                let mut prod = entries[0].field.one();
                for (t, &m) in entries.iter().zip(exponents) {
                    prod = prod.mul_ref(&t.pow_signed(m));
                }
                psi.eval(&prod)
            }
            _ => Err(GenericityError::UnsupportedTorus),
        }
    }

    pub fn eval_ext(&self, s: &LocalFieldElement) -> Result<Cyc> {
        match self {
            TorusCharacterData::NormOne(c) => c.eval(s),
            TorusCharacterData::Induced(c) => c.eval(s),
            _ => Err(GenericityError::UnsupportedTorus),
        }
    }

    pub fn is_trivial_on_sample(&self, probes: &[Vec<LocalFieldElement>]) -> Result<bool> {
        for p in probes {
            let v = match self {
                TorusCharacterData::SplitMonomial { .. } => self.eval_diag(p)?,
                _ => self.eval_ext(&p[0])?,
            };
            if !v.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Probe elements of S(F)_level spanning the level quotient, used by the
/// empirical depth computation. Returned as coordinate vectors (diag entries
/// for split tori, a single extension element otherwise).
pub fn level_probes(
    torus: &TorusDescriptor,
    level_e: i64,
    field: LocalField,
) -> Vec<Vec<LocalFieldElement>> {
    match torus {
        TorusDescriptor::DiagonalSplit { n, .. } => {
            // generators: 1 + pi^level in one slot, others 1 (plus a unit twist)
            let mut probes = Vec::new();
            for slot in 0..*n {
                for u in [1i64, 2] {
                    let mut entries = vec![field.one(); *n];
                    entries[slot] = field.one().add_ref(&field.int(u).shift_pi(level_e));
                    probes.push(entries);
                }
            }
            if level_e == 0 {
                // units modulo 1+pi: Teichmueller directions
                for slot in 0..*n {
                    let mut entries = vec![field.one(); *n];
                    entries[slot] = field.int(Fq::generator(field.p, 1, 0).a as i64);
                    probes.push(entries);
                }
            }
            probes
        }
        TorusDescriptor::NormOne { ext } => {
            let mut probes = Vec::new();
            if level_e == 0 {
                // tame norm-one generator, via Teichmueller lift
                if ext.e == 1 {
                    let g = Fq::generator(ext.p, 2, ext.nonres).pow(ext.p - 1);
                    let lift = LocalFieldElement::from_residue(*ext, g);
                    let t = teichmuller_part(&lift, ext.precision).unwrap();
                    probes.push(vec![t]);
                } else {
                    probes.push(vec![ext.int(-1)]);
                }
            } else {
                // s = u / sigma(u) with u = 1 + pi^level * (w-ish unit)
                let dirs: Vec<LocalFieldElement> = if ext.f == 2 {
                    vec![ext.w_gen(), ext.w_gen().add_ref(&ext.one())]
                } else {
                    vec![ext.one(), ext.int(2)]
                };
                for d in dirs {
                    let u = ext.one().add_ref(&d.shift_pi(level_e));
                    let s = u.mul_ref(&u.conjugate().inv().unwrap());
                    // only keep honest level elements
                    if s.sub_ref(&ext.one())
                        .certify_val_at_least(level_e)
                        .unwrap_or(false)
                    {
                        probes.push(vec![s]);
                    }
                }
            }
            probes
        }
        TorusDescriptor::InducedQuadratic { ext } => {
            let mut probes = Vec::new();
            if level_e == 0 {
                let g = Fq::generator(ext.p, 2, ext.nonres);
                let lift = LocalFieldElement::from_residue(*ext, g);
                probes.push(vec![teichmuller_part(&lift, ext.precision).unwrap()]);
            } else {
                for d in [ext.one(), ext.w_gen()] {
                    probes.push(vec![ext.one().add_ref(&d.shift_pi(level_e))]);
                }
            }
            probes
        }
    }
}

/// The depth of a torus character: the largest filtration level with a
/// nontrivial level character, computed by exact evaluation on level probes.
/// Returns (depth, is_trivial).
pub fn char_depth(theta: &TorusCharacterData, field: LocalField) -> Result<(Rat, bool)> {
    let torus = theta.torus();
    let e = match &torus {
        TorusDescriptor::DiagonalSplit { .. } => field.e as i64,
        TorusDescriptor::NormOne { ext } | TorusDescriptor::InducedQuadratic { ext } => {
            ext.e as i64
        }
    };
    let max_level = match &torus {
        TorusDescriptor::DiagonalSplit { .. } => field.precision - 1,
        TorusDescriptor::NormOne { ext } | TorusDescriptor::InducedQuadratic { ext } => {
            ext.precision - 2
        }
    };
    let mut depth: Option<Rat> = None;
    let mut any_nontrivial = false;
    for level in 0..=max_level {
        let probes = level_probes(&torus, level, field);
        if probes.is_empty() {
            continue;
        }
        if !theta.is_trivial_on_sample(&probes)? {
            any_nontrivial = true;
            depth = Some(Rat::new(level, e));
        }
    }
    match depth {
        Some(d) => Ok((d, false)),
        None => Ok((rat_int(0), !any_nontrivial)),
    }
}

/// A dual-Lie-algebra element for a supported torus.
#[derive(Clone, Debug)]
pub enum DualElement {
    /// X = sum c_i e_i^* on the split diagonal torus of GL_n.
    Split { coords: Vec<LocalFieldElement> },
    /// X = Tr(c . log)-style functional on a norm-one torus.
    NormOne { coeff: LocalFieldElement },
    /// X = Tr(xi . )-functional on E (induced torus in GL2).
    Induced { coeff: LocalFieldElement },
}

impl DualElement {
    /// GE0 depth: the level r with X in Lie*_r minus Lie*_{r+}; None for 0.
    pub fn depth(&self) -> Result<Option<Rat>> {
        match self {
            DualElement::Split { coords } => {
                let mut best: Option<Rat> = None;
                for c in coords {
                    if let Some(v) = c.val()? {
                        best = Some(match best {
                            None => v,
                            Some(b) => b.min(v),
                        });
                    }
                }
                Ok(best)
            }
            DualElement::NormOne { coeff } | DualElement::Induced { coeff } => Ok(coeff.val()?),
        }
    }

    /// Valuations val(X(H_alpha)) over the roots outside the twisted Levi.
    /// For the split torus these are all pairs i != j; for the rank-one
    /// elliptic tori the two roots +-alpha give one common valuation.
    pub fn outside_valuations(&self) -> Result<Vec<(String, Option<Rat>)>> {
        match self {
            DualElement::Split { coords } => {
                let n = coords.len();
                let mut out = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            let diff = coords[i].sub_ref(&coords[j]);
                            out.push((format!("a_{}{}", i + 1, j + 1), diff.val()?));
                        }
                    }
                }
                Ok(out)
            }
            DualElement::NormOne { coeff } => {
                // X(H_alpha) = (pairing coefficient in the trace-zero line):
                // val = val over F of the coefficient against the natural
                // H_alpha normalization, equal to val(c) here.
                let v = x_h_alpha_val_norm_one(coeff)?;
                Ok(vec![("alpha".into(), v.clone()), ("-alpha".into(), v)])
            }
            DualElement::Induced { coeff } => {
                // X(H_alpha) = xi - sigma(xi)
                let diff = coeff.sub_ref(&coeff.conjugate());
                let v = diff.val()?;
                Ok(vec![("alpha".into(), v.clone()), ("-alpha".into(), v)])
            }
        }
    }
}

/// val(X(H_alpha)) for the norm-one torus: the functional pairs log with c
/// through the trace, and H_alpha corresponds to the normalized trace-zero
/// direction; the value is val(c w - sigma-part) = val of the skew part of c.
fn x_h_alpha_val_norm_one(coeff: &LocalFieldElement) -> Result<Option<Rat>> {
    // skew part of the coefficient: (c - sigma(c))/2 pairs nontrivially
    let skew = coeff.sub_ref(&coeff.conjugate());
    let half = coeff.field.rational(1, 2);
    skew.mul_ref(&half).val().map_err(GenericityError::from)
}

#[derive(Clone, Debug)]
pub struct Ge1Report {
    pub depth: Option<Rat>,
    pub expected: Rat,
    pub valuations: Vec<(String, Option<Rat>)>,
    pub pass: bool,
}

/// GE1: val(X(H_alpha)) = r for all roots outside the twisted Levi, after a
/// GE0 depth check. `outside` filters the valuation list by root label.
pub fn ge1_check(x: &DualElement, r: Rat, outside: &dyn Fn(&str) -> bool) -> Result<Ge1Report> {
    let depth = x.depth()?;
    if depth != Some(r) {
        return Err(GenericityError::GE0Failed(format!(
            "X has depth {:?}, expected {}",
            depth, r
        )));
    }
    let valuations: Vec<(String, Option<Rat>)> = x
        .outside_valuations()?
        .into_iter()
        .filter(|(name, _)| outside(name))
        .collect();
    let pass = valuations.iter().all(|(_, v)| *v == Some(r));
    Ok(Ge1Report {
        depth,
        expected: r,
        valuations,
        pass,
    })
}

/// GE2: the stabilizer of the reduction of X/varpi_r in the absolute Weyl
/// group equals the Weyl group of the twisted Levi (supplied by its order).
/// The reduction is taken over the splitting residue field; the result is
/// independent of the choice of varpi_r.
pub fn ge2_check(x: &DualElement, r: Rat, levi_weyl_order: usize) -> Result<bool> {
    match x {
        DualElement::Split { coords } => {
            let n = coords.len();
            let field = coords[0].field;
            // reduce c_i / pi^r (r integral for split tori)
            assert!(r.is_integer(), "split torus dual depths are integral");
            let shift = -(r.to_integer()) * field.e as i64;
            let mut residues = Vec::new();
            for c in coords {
                let scaled = c.shift_pi(shift);
                residues.push(scaled.residue()?);
            }
            // stabilizer inside S_n
            let perms = permutations(n);
            let stab = perms
                .iter()
                .filter(|p| (0..n).all(|i| residues[p[i]] == residues[i]))
                .count();
            Ok(stab == levi_weyl_order)
        }
        DualElement::NormOne { .. } | DualElement::Induced { .. } => {
            // rank one: the nontrivial Weyl element negates / swaps; the
            // stabilizer is trivial iff the skew reduction is nonzero, which
            // is exactly GE1 at the stated depth.
            let vals = x.outside_valuations()?;
            let depth = x.depth()?;
            let fixed = vals.iter().all(|(_, v)| *v != depth);
            let stab = if fixed { 2 } else { 1 };
            Ok(stab == levi_weyl_order)
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q: Vec<usize> = p
                .iter()
                .map(|&x| if x >= pos { x + 1 } else { x })
                .collect();
            q.insert(0, pos);
            // normalize: we want all perms of 0..n; rebuild properly below
            out.push(q);
        }
    }
    // the construction above inserts the new maximal element; dedupe defensively
    out.sort();
    out.dedup();
    out
}

/// The dual element realizing the depth-r level of a torus character through
/// the Moy-Prasad isomorphism.
pub fn dual_element_of_character(
    theta: &TorusCharacterData,
    field: LocalField,
) -> Result<DualElement> {
    match theta {
        TorusCharacterData::SplitMonomial { psi, exponents } => {
            let c = psi
                .wild_coeff
                .clone()
                .ok_or_else(|| GenericityError::GE0Failed("character has no wild part".into()))?;
            let coords = exponents
                .iter()
                .map(|&m| c.mul_ref(&c.field.int(m)))
                .collect();
            let _ = field;
            Ok(DualElement::Split { coords })
        }
        TorusCharacterData::NormOne(chi) => {
            let c = chi
                .wild_coeff
                .clone()
                .ok_or_else(|| GenericityError::GE0Failed("character has no wild part".into()))?;
            Ok(DualElement::NormOne {
                coeff: normalize_norm_one_coeff(&c),
            })
        }
        TorusCharacterData::Induced(chi) => {
            let c = chi
                .wild_coeff
                .clone()
                .ok_or_else(|| GenericityError::GE0Failed("character has no wild part".into()))?;
            Ok(DualElement::Induced { coeff: c })
        }
    }
}

/// The wild pairing on a norm-one torus only sees the skew part of the
/// coefficient (the logarithm is trace-zero); normalize so the dual element
/// is honestly skew.
fn normalize_norm_one_coeff(c: &LocalFieldElement) -> LocalFieldElement {
    let half = c.field.rational(1, 2);
    c.sub_ref(&c.conjugate()).mul_ref(&half)
}

/// Is theta a (G, S)-generic character of depth r? Solves for the dual
/// element X of the depth-r level and runs GE1 and GE2 on X (of depth -r).
pub fn is_generic_character(
    theta: &TorusCharacterData,
    field: LocalField,
    r: Rat,
    levi_weyl_order: usize,
    outside: &dyn Fn(&str) -> bool,
) -> Result<bool> {
    let (depth, trivial) = char_depth(theta, field)?;
    if trivial || depth != r {
        return Err(GenericityError::DepthMismatch(depth, r));
    }
    let x = dual_element_of_character(theta, field)?;
    let report = match ge1_check(&x, -r, outside) {
        Ok(rep) => rep,
        Err(GenericityError::GE0Failed(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    if !report.pass {
        return Ok(false);
    }
    ge2_check(&x, -r, levi_weyl_order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q7(prec: i64) -> LocalField {
        LocalField::qp(7, prec)
    }

    fn psi_depth_one(f: LocalField) -> ExtChar {
        ExtChar::depth_one(f)
    }

    #[test]
    fn psi_has_depth_one() {
        let f = q7(5);
        let psi = psi_depth_one(f);
        // nontrivial on 1 + 7 Z_7
        assert!(!psi.eval(&f.int(8)).unwrap().is_one());
        // trivial on 1 + 49 Z_7
        assert!(psi.eval(&f.int(50)).unwrap().is_one());
        assert!(psi.eval(&f.int(8)).unwrap().is_unit_modulus());
    }

    #[test]
    fn split_character_depths() {
        let f = q7(5);
        let psi = psi_depth_one(f);
        let theta = TorusCharacterData::SplitMonomial {
            psi: psi.clone(),
            exponents: vec![1, -1],
        };
        let (d, trivial) = char_depth(&theta, f).unwrap();
        assert_eq!(d, rat_int(1));
        assert!(!trivial);
        let trivial_theta = TorusCharacterData::SplitMonomial {
            psi: ExtChar::trivial(f),
            exponents: vec![1, 0],
        };
        let (d0, t0) = char_depth(&trivial_theta, f).unwrap();
        assert_eq!(d0, rat_int(0));
        assert!(t0);
    }

    #[test]
    fn the_five_gl2_examples() {
        // psi(t1), psi(t2), psi(t1 t2^{-1}) generic; psi(t1 t2), psi(t1 t2^{-6}) not
        let f = q7(5);
        let psi = psi_depth_one(f);
        let cases: Vec<(Vec<i64>, bool, Option<Rat>)> = vec![
            (vec![1, 0], true, Some(rat_int(-1))),
            (vec![0, 1], true, Some(rat_int(-1))),
            (vec![1, -1], true, Some(rat_int(-1))),
            (vec![1, 1], false, None),
            (vec![1, -6], false, Some(rat_int(0))),
        ];
        for (exps, expect, expect_val) in cases {
            let theta = TorusCharacterData::SplitMonomial {
                psi: psi.clone(),
                exponents: exps.clone(),
            };
            let verdict = is_generic_character(&theta, f, rat_int(1), 1, &|_| true).unwrap();
            assert_eq!(verdict, expect, "exponents {exps:?}");
            let x = dual_element_of_character(&theta, f).unwrap();
            let vals = x.outside_valuations().unwrap();
            assert_eq!(vals[0].1, expect_val, "exponents {exps:?}");
        }
    }

    #[test]
    fn ge0_gate() {
        let f = q7(5);
        // X of depth 0 tested at r = -1 must fail GE0
        let x = DualElement::Split {
            coords: vec![f.int(1), f.int(0)],
        };
        assert!(matches!(
            ge1_check(&x, rat_int(-1), &|_| true),
            Err(GenericityError::GE0Failed(_))
        ));
    }

    #[test]
    fn ge2_rank_two_synthetic() {
        let f = LocalField::qp(7, 5);
        // A_2: coords with exactly one tie -> stabilizer order 2
        let x = DualElement::Split {
            coords: vec![f.int(1), f.int(1), f.int(3)],
        };
        assert!(ge2_check(&x, rat_int(0), 2).unwrap());
        assert!(!ge2_check(&x, rat_int(0), 1).unwrap());
        assert!(!ge2_check(&x, rat_int(0), 6).unwrap());
        // zero reduction: stabilizer is everything
        let z = DualElement::Split {
            coords: vec![f.int(7), f.int(14), f.int(21)],
        };
        assert!(ge2_check(&z, rat_int(0), 6).unwrap());
    }

    #[test]
    fn ge1_implies_ge2_when_p_large() {
        // p = 7 does not divide |W(GL2)| = 2: check the implication on
        // a family of split dual elements
        let f = q7(5);
        for (a, b) in [(1i64, 0i64), (3, 1), (2, 9)] {
            let x = DualElement::Split {
                coords: vec![f.int(a), f.int(b)],
            };
            if let Ok(rep) = ge1_check(&x, rat_int(0), &|_| true) {
                if rep.pass {
                    assert!(ge2_check(&x, rat_int(0), 1).unwrap());
                }
            }
        }
    }

    #[test]
    fn scaling_by_units_preserves_genericity() {
        let f = q7(5);
        let psi = psi_depth_one(f);
        let theta = TorusCharacterData::SplitMonomial {
            psi,
            exponents: vec![1, 0],
        };
        let x = dual_element_of_character(&theta, f).unwrap();
        if let DualElement::Split { coords } = &x {
            for u in [2i64, 3, 6] {
                let scaled = DualElement::Split {
                    coords: coords.iter().map(|c| c.mul_ref(&f.int(u))).collect(),
                };
                let r1 = ge1_check(&scaled, rat_int(-1), &|_| true).unwrap();
                assert!(r1.pass);
                assert!(ge2_check(&scaled, rat_int(-1), 1).unwrap());
            }
        }
    }

    #[test]
    fn ramified_norm_one_depth_half() {
        // the SL2 example: theta(a + b sqrt(p)) with wild coefficient of
        // valuation -1/2 has depth 1/2
        let e = LocalField::ramified_quadratic(7, 6);
        let c = e.int(2).mul_ref(&e.uniformizer().inv().unwrap());
        let chi = NormOneChar {
            ext: e,
            tame_exp: 0,
            wild_coeff: Some(c),
        };
        let theta = TorusCharacterData::NormOne(chi);
        let (d, trivial) = char_depth(&theta, e).unwrap();
        assert!(!trivial);
        assert_eq!(d, Rat::new(1, 2));
        // and it is generic of depth 1/2 (rank one: W(S) trivial)
        assert!(is_generic_character(&theta, e, Rat::new(1, 2), 1, &|_| true).unwrap());
    }

    #[test]
    fn unramified_induced_depths() {
        let e = LocalField::unramified_quadratic(3, 6);
        // generic: skew coefficient of valuation -2
        let c = e.w_gen().shift_pi(-2);
        let chi = ExtChar {
            ext: e,
            on_uniformizer: Cyc::one(),
            tame_exp: 0,
            wild_coeff: Some(c),
        };
        let theta = TorusCharacterData::Induced(chi);
        let (d, _) = char_depth(&theta, e).unwrap();
        assert_eq!(d, rat_int(2));
        assert!(is_generic_character(&theta, e, rat_int(2), 1, &|_| true).unwrap());
        // non-generic: symmetric coefficient (factors through the norm)
        let c2 = e.one().shift_pi(-2);
        let chi2 = ExtChar {
            ext: e,
            on_uniformizer: Cyc::one(),
            tame_exp: 0,
            wild_coeff: Some(c2),
        };
        let theta2 = TorusCharacterData::Induced(chi2);
        let (d2, _) = char_depth(&theta2, e).unwrap();
        assert_eq!(d2, rat_int(2));
        assert!(!is_generic_character(&theta2, e, rat_int(2), 1, &|_| true).unwrap());
    }

    #[test]
    fn norm_one_char_is_multiplicative() {
        let e = LocalField::unramified_quadratic(7, 5);
        let chi = NormOneChar {
            ext: e,
            tame_exp: 1,
            wild_coeff: Some(e.w_gen().shift_pi(-1)),
        };
        // sample norm-one elements u/sigma(u)
        let mk = |a: i64, b: i64| {
            let u = e.int(a).add_ref(&e.w_gen().mul_ref(&e.int(b)));
            u.mul_ref(&u.conjugate().inv().unwrap())
        };
        let s1 = mk(1, 3);
        let s2 = mk(2, 1);
        let lhs = chi.eval(&s1).unwrap() * chi.eval(&s2).unwrap();
        let rhs = chi.eval(&s1.mul_ref(&s2)).unwrap();
        assert_eq!(lhs, rhs);
        assert!(chi.eval(&s1).unwrap().is_unit_modulus());
    }
}
