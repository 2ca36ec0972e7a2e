//! Yu data for rank-one groups: validity checking, the compact-mod-center
//! group K-tilde, extended characters, kappa assembly through the
//! Heisenberg/Weil machinery, refactorization equivalence, and the regular
//! tame elliptic pair pipeline (Phi_r jumps, Howe factorization, datum
//! assembly).

use crate::building::{
    jump_set, mp_descriptor, quotient_coordinates, BtTriple, GroupKind, TorusDescriptor,
};
use crate::cyclotomic::Cyc;
use crate::fq::Fq;
use crate::genericity::{
    char_depth, is_generic_character, ExtChar, GenericityError, NormOneChar, TorusCharacterData,
};
use crate::heisenberg_weil::{commutator_form, weil, HeisenbergRep, WeilRep};
use crate::local_field::{LocalField, LocalFieldElement, LocalFieldError};
use crate::matrix::Mat;
use crate::rat::{rat_int, Level, Rat};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum YuError {
    #[error("unsupported descriptor: {0}")]
    UnsupportedDescriptor(String),
    #[error("incomparable Yu data: {0}")]
    IncomparableData(String),
    #[error("no Howe factorization: {0}")]
    NoFactorization(String),
    #[error("decomposition unavailable: {0}")]
    DecompositionUnavailable(String),
    #[error("{0}")]
    Local(#[from] LocalFieldError),
    #[error("{0}")]
    Genericity(#[from] GenericityError),
    #[error("{0}")]
    Weil(#[from] crate::heisenberg_weil::WeilError),
    #[error("{0}")]
    Building(#[from] crate::building::BuildingError),
}

pub type Result<T> = std::result::Result<T, YuError>;

fn zero_q() -> BigRational {
    BigRational::from_integer(BigInt::from(0))
}

/// A twisted Levi in a rank-one sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum LeviDescriptor {
    Group(GroupKind),
    /// Norm-one torus of a quadratic extension, elliptic in SL2.
    NormOneTorus {
        ext: LocalField,
    },
    /// E^x for a quadratic extension, elliptic in GL2.
    InducedTorus {
        ext: LocalField,
    },
    /// Split diagonal torus (never anisotropic mod center; rejected by (i)).
    DiagonalTorus {
        n: usize,
    },
}

impl LeviDescriptor {
    pub fn is_torus(&self) -> bool {
        !matches!(self, LeviDescriptor::Group(_))
    }
}

/// Characters phi_i of the groups G_{i+1}(F) in a rank-one sequence.
#[derive(Clone, Debug)]
pub enum CharOfLevi {
    /// Character of a torus G_{i+1} = S.
    Torus(TorusCharacterData),
    /// (character of F^x) composed with det on GL_2(F).
    DetChar(ExtChar),
}

/// Element of a rank-one group: either a 2x2 matrix over F or a torus
/// element of the quadratic extension.
#[derive(Clone, Debug)]
pub enum GroupElement {
    Matrix(Mat<LocalFieldElement>),
    Ext(LocalFieldElement),
}

/// Embed a quadratic-extension element into GL_2(F): for the ramified
/// extension a + b pi -> [[a, b], [p b, a]], for the
/// unramified one a + b w -> [[a, n b], [b, a]].
pub fn embed_ext(s: &LocalFieldElement) -> Mat<LocalFieldElement> {
    let ext = s.field;
    let (a, b) = quadratic_parts(s);
    let scale = if ext.e == 2 {
        ext.p as i64
    } else {
        ext.nonres as i64
    };
    let f = a.field;
    Mat::from_rows(vec![
        vec![
            a.clone(),
            b.mul_ref(&f.int(if ext.e == 2 { 1 } else { scale })),
        ],
        vec![b.mul_ref(&f.int(if ext.e == 2 { scale } else { 1 })), a],
    ])
}

/// Split s in E into base-field coordinates (a, b) with s = a + b root.
pub fn quadratic_parts(s: &LocalFieldElement) -> (LocalFieldElement, LocalFieldElement) {
    let ext = s.field;
    let half = ext.rational(1, 2);
    let a = s.add_ref(&s.conjugate()).mul_ref(&half).retract_to_base();
    let root = if ext.e == 2 {
        ext.uniformizer()
    } else {
        ext.w_gen()
    };
    let b = s
        .sub_ref(&s.conjugate())
        .mul_ref(&half)
        .mul_ref(&root.inv().expect("root invertible"))
        .retract_to_base();
    (a, b)
}

/// Read a torus element back off its matrix embedding.
pub fn unembed_ext(m: &Mat<LocalFieldElement>, ext: LocalField) -> LocalFieldElement {
    let a = &m[(0, 0)];
    let b = if ext.e == 2 {
        m[(0, 1)].clone()
    } else {
        m[(1, 0)].clone()
    };
    let lift = |x: &LocalFieldElement| -> LocalFieldElement {
        // reinterpret an F-element inside E
        let coords = x.exact_coords().expect("exact entries expected").clone();
        LocalFieldElement::from_coords(ext, [coords[0].clone(), zero_q(), zero_q(), zero_q()])
    };
    let root = if ext.e == 2 {
        ext.uniformizer()
    } else {
        ext.w_gen()
    };
    lift(a).add_ref(&lift(&b).mul_ref(&root))
}

impl CharOfLevi {
    pub fn eval(&self, g: &GroupElement) -> Result<Cyc> {
        match (self, g) {
            (CharOfLevi::Torus(t), GroupElement::Ext(s)) => Ok(t.eval_ext(s)?),
            (CharOfLevi::Torus(t), GroupElement::Matrix(m)) => {
                // matrix must lie in the embedded torus
                match t {
                    TorusCharacterData::NormOne(c) => {
                        let s = unembed_ext(m, c.ext);
                        Ok(t.eval_ext(&s)?)
                    }
                    TorusCharacterData::Induced(c) => {
                        let s = unembed_ext(m, c.ext);
                        Ok(t.eval_ext(&s)?)
                    }
                    TorusCharacterData::SplitMonomial { .. } => {
                        let entries: Vec<LocalFieldElement> =
                            (0..m.rows).map(|i| m[(i, i)].clone()).collect();
                        Ok(t.eval_diag(&entries)?)
                    }
                }
            }
            (CharOfLevi::DetChar(psi), GroupElement::Matrix(m)) => Ok(psi.eval(&m.det())?),
            (CharOfLevi::DetChar(psi), GroupElement::Ext(s)) => {
                // det of the embedding is the norm
                Ok(psi.eval(&s.norm_to_base())?)
            }
        }
    }

    pub fn depth(&self, field: LocalField) -> Result<Rat> {
        match self {
            CharOfLevi::Torus(t) => Ok(char_depth(t, field)?.0),
            CharOfLevi::DetChar(psi) => {
                // depth of psi-compose-det equals the depth of psi
                Ok(psi.wild_depth().max(rat_int(0)))
            }
        }
    }
}

/// Cuspidality provenance for the depth-zero part rho.
#[derive(Clone, Debug, PartialEq)]
pub enum CuspidalCert {
    /// G_{n+1} is a torus: the reductive quotient has no proper parabolics.
    TorusAutomatic,
    /// Verified through the finite-group oracle at residue size q.
    FinRepChecked { q: u64 },
    /// Declared by the caller (Deligne-Lusztig handle at large q).
    Declared,
}

/// The opaque depth-zero representation: a Deligne-Lusztig style handle plus
/// an optional explicit character when G_{n+1} is a torus.
#[derive(Clone, Debug)]
pub struct RhoHandle {
    pub label: String,
    pub depth_zero_char: Option<TorusCharacterData>,
    pub cert: CuspidalCert,
}

impl RhoHandle {
    pub fn trivial() -> RhoHandle {
        RhoHandle {
            label: "trivial".into(),
            depth_zero_char: None,
            cert: CuspidalCert::TorusAutomatic,
        }
    }

    pub fn degree(&self) -> usize {
        1
    }
}

/// The full Yu datum for a rank-one sequence.
#[derive(Clone, Debug)]
pub struct YuDatum {
    pub field: LocalField,
    /// G_1, ..., G_{n+1} (so levi.len() = n + 1).
    pub levi: Vec<LeviDescriptor>,
    pub point: BtTriple,
    pub depths: Vec<Rat>,
    pub characters: Vec<CharOfLevi>,
    pub rho: RhoHandle,
}

impl YuDatum {
    pub fn n(&self) -> usize {
        self.depths.len()
    }
}

/// Per-condition validity report.
#[derive(Clone, Debug)]
pub struct ValidityReport {
    pub conditions: Vec<(String, bool, String)>,
}

impl ValidityReport {
    pub fn valid(&self) -> bool {
        self.conditions.iter().all(|(_, ok, _)| *ok)
    }

    pub fn condition(&self, name: &str) -> Option<bool> {
        self.conditions
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, ok, _)| *ok)
    }
}

/// Validate the structural and checkable conditions of a Yu datum.
pub fn validate_yu_datum(d: &YuDatum) -> Result<ValidityReport> {
    let mut conditions = Vec::new();
    // (a)-(e) structural
    let n = d.n();
    let structural = d.levi.len() == n + 1
        && d.characters.len() == n
        && d.depths.windows(2).all(|w| w[0] > w[1])
        && d.depths.iter().all(|r| r.is_positive());
    conditions.push((
        "structure".into(),
        structural,
        format!("n = {n}, decreasing positive depths"),
    ));
    // (i) anisotropy of Z(G_{n+1})/Z(G)
    let last = d.levi.last().unwrap();
    let (aniso, note) = match last {
        LeviDescriptor::Group(_) => (true, "Z(G)/Z(G) trivial".to_string()),
        LeviDescriptor::NormOneTorus { .. } => (true, "norm-one torus is anisotropic".into()),
        LeviDescriptor::InducedTorus { .. } => (true, "E^x / F^x is anisotropic".into()),
        LeviDescriptor::DiagonalTorus { .. } => {
            (false, "split torus has noncompact center quotient".into())
        }
    };
    conditions.push(("anisotropic-center".into(), aniso, note));
    // (ii) [x] is a vertex of B(G_{n+1})
    let vertex_ok = if last.is_torus() {
        true
    } else {
        d.point.reduced().is_vertex()
    };
    let coords: Vec<String> = d
        .point
        .reduced()
        .x_bt
        .iter()
        .map(|v| v.to_string())
        .collect();
    conditions.push((
        "vertex".into(),
        vertex_ok,
        format!("[x] = ({})", coords.join(", ")),
    ));
    // (iii) genericity of phi_i whenever G_i != G_{i+1}
    for i in 0..n {
        if d.levi[i] == d.levi[i + 1] {
            conditions.push((
                format!("generic-{}", i + 1),
                true,
                "G_i = G_{i+1}: no genericity required".into(),
            ));
            continue;
        }
        let r = d.depths[i];
        let ok = match &d.characters[i] {
            CharOfLevi::Torus(t) => {
                let field = torus_field(t);
                match is_generic_character(t, field, r, 1, &|_| true) {
                    Ok(v) => v,
                    Err(GenericityError::DepthMismatch(_, _)) => false,
                    Err(e) => return Err(e.into()),
                }
            }
            CharOfLevi::DetChar(_) => false, // det characters only allowed when G_i = G_{i+1}
        };
        conditions.push((format!("generic-{}", i + 1), ok, format!("depth {r}")));
    }
    // (iv) cuspidality of rho on the reductive quotient
    let (cusp_ok, cusp_note) = match (&d.rho.cert, last) {
        (CuspidalCert::TorusAutomatic, l) if l.is_torus() => (
            true,
            "torus quotient: all irreducibles cuspidal".to_string(),
        ),
        (CuspidalCert::TorusAutomatic, _) => (
            false,
            "automatic certificate claimed for a non-torus".into(),
        ),
        (CuspidalCert::FinRepChecked { q }, _) => (true, format!("finite oracle at q = {q}")),
        (CuspidalCert::Declared, _) => (true, "declared (Deligne-Lusztig handle)".into()),
    };
    conditions.push(("cuspidal".into(), cusp_ok, cusp_note));
    Ok(ValidityReport { conditions })
}

fn torus_field(t: &TorusCharacterData) -> LocalField {
    match t {
        TorusCharacterData::SplitMonomial { psi, .. } => psi.ext,
        TorusCharacterData::NormOne(c) => c.ext,
        TorusCharacterData::Induced(c) => c.ext,
    }
}

/// The compact-mod-center group K-tilde = prod (G_i)_{x, r_i/2} (G_{n+1})_{[x]}
/// as a membership tester for rank-one data.
#[derive(Clone, Debug)]
pub struct TildeK {
    pub field: LocalField,
    pub point: BtTriple,
    /// Level r_1/2 of the big-group factor, when n >= 1.
    pub deep_level: Option<Level>,
    /// The stabilizer factor: torus transversal or parahoric.
    pub last: LeviDescriptor,
}

pub fn assemble_tilde_k(d: &YuDatum, field: LocalField) -> TildeK {
    let deep_level = if d.n() >= 1 {
        Some(Level::at(d.depths[0] / rat_int(2)))
    } else {
        None
    };
    TildeK {
        field,
        point: d.point.clone(),
        deep_level,
        last: d.levi.last().unwrap().clone(),
    }
}

impl TildeK {
    /// Transversal of S(F) modulo S(F) cap G_{x, r/2}: tame representatives
    /// times principal-unit digits below the level (and uniformizer powers
    /// for the induced torus, bounded by the valuation of det g).
    fn torus_transversal(
        &self,
        ext: LocalField,
        norm_one: bool,
        level: Level,
        det_val: Rat,
    ) -> Vec<LocalFieldElement> {
        let e = ext.e as i64;
        let level_e = if level.plus {
            (level.r * rat_int(e)).floor().to_integer() + 1
        } else {
            (level.r * rat_int(e)).ceil().to_integer()
        };
        let mut tame: Vec<LocalFieldElement> = Vec::new();
        if norm_one {
            if ext.e == 2 {
                tame.push(ext.one());
                tame.push(ext.int(-1));
            } else {
                // mu_{q+1}: powers of the Teichmueller lift of g^(q-1)
                let g = Fq::generator(ext.p, 2, ext.nonres).pow(ext.p - 1);
                let lift = LocalFieldElement::from_residue(ext, g);
                let zeta = crate::local_field::teichmuller_part(&lift, ext.precision).unwrap();
                let mut cur = ext.one().truncate(ext.precision);
                for _ in 0..=ext.p {
                    tame.push(cur.clone());
                    cur = cur.mul_ref(&zeta).truncate(ext.precision);
                }
            }
        } else {
            // units mu_{q^2-1} and uniformizer powers to balance det
            let g = Fq::generator(ext.p, 2, ext.nonres);
            let lift = LocalFieldElement::from_residue(ext, g);
            let zeta = crate::local_field::teichmuller_part(&lift, ext.precision).unwrap();
            let mut cur = ext.one().truncate(ext.precision);
            for _ in 0..(ext.p * ext.p - 1) {
                tame.push(cur.clone());
                cur = cur.mul_ref(&zeta).truncate(ext.precision);
            }
        }
        // principal-unit digit representatives below level_e
        let dirs: Vec<LocalFieldElement> = if ext.f == 2 {
            vec![ext.one(), ext.w_gen()]
        } else {
            vec![ext.one()]
        };
        let mut principal = vec![ext.one()];
        for lvl in 1..level_e.max(0) {
            let mut next = Vec::new();
            for base in &principal {
                for d0 in 0..ext.p {
                    for dir in &dirs {
                        if d0 == 0 && dir as *const _ != &dirs[0] as *const _ {
                            continue;
                        }
                        let t = dir.mul_ref(&ext.int(d0 as i64)).shift_pi(lvl);
                        let u = ext.one().add_ref(&t);
                        next.push(base.mul_ref(&u).truncate(ext.precision + level_e));
                    }
                }
            }
            next.dedup_by(|a, b| a == b);
            principal = next;
        }
        let mut out = Vec::new();
        let uniformizer_range: Vec<i64> = if norm_one {
            vec![0]
        } else {
            // det(embed(pi_E^k u)) has valuation (2/e) k ... pick k matching
            let k = (det_val * rat_int(e) / rat_int(2)).to_integer();
            vec![k]
        };
        // principal parts of norm one: u / sigma(u) ranges over the
        // norm-one principal units as u does
        let principal: Vec<LocalFieldElement> = if norm_one {
            principal
                .iter()
                .map(|u| u.mul_ref(&u.conjugate().inv().unwrap()))
                .collect()
        } else {
            principal
        };
        for k in &uniformizer_range {
            for t in &tame {
                for u in &principal {
                    let s = t.mul_ref(u);
                    out.push(s.shift_pi(*k));
                }
            }
        }
        out
    }

    /// Membership test for 2x2 matrices over F.
    pub fn contains(&self, g: &Mat<LocalFieldElement>) -> Result<bool> {
        if self.deep_level.is_none() {
            if let LeviDescriptor::NormOneTorus { ext } | LeviDescriptor::InducedTorus { ext } =
                &self.last
            {
                // n = 0 with a torus bottom: K-tilde is S(F) itself
                return is_embedded_torus_element(g, *ext, matches!(
                    self.last,
                    LeviDescriptor::NormOneTorus { .. }
                ));
            }
        }
        let level = match self.deep_level {
            Some(l) => l,
            None => Level::at(rat_int(0)),
        };
        let desc = mp_descriptor(&self.point, level);
        match &self.last {
            LeviDescriptor::Group(_) => {
                // stabilizer of the vertex: the parahoric (SL) possibly
                // center-twisted (GL): try unit-scalar twists
                Ok(desc_contains_mod_center(&desc, g, self.field)?)
            }
            LeviDescriptor::NormOneTorus { ext } | LeviDescriptor::InducedTorus { ext } => {
                let norm_one = matches!(self.last, LeviDescriptor::NormOneTorus { .. });
                let det_val = g.det().val()?.unwrap_or(rat_int(0));
                for s in self.torus_transversal(*ext, norm_one, level, det_val) {
                    let sm = embed_ext(&s);
                    let candidate = sm.inverse().and_then(|si| Some(si.mul(g)));
                    if let Some(c) = candidate {
                        if desc.contains(&c).unwrap_or(false) {
                            return Ok(true);
                        }
                    }
                }
                Ok(false)
            }
            LeviDescriptor::DiagonalTorus { .. } => {
                Err(YuError::UnsupportedDescriptor("split torus K-tilde".into()))
            }
        }
    }
}

/// Does the matrix match the embedded-torus pattern (and the norm-one
/// condition when required)?
fn is_embedded_torus_element(
    g: &Mat<LocalFieldElement>,
    ext: LocalField,
    norm_one: bool,
) -> Result<bool> {
    let field = g.sample().field;
    let prec = field.precision;
    // pattern: diagonal entries equal; off-diagonals related by the scale
    if !g[(0, 0)].eq_mod(&g[(1, 1)], prec * field.e as i64).unwrap_or(false) {
        return Ok(false);
    }
    let (up, lo) = (g[(0, 1)].clone(), g[(1, 0)].clone());
    let scaled = if ext.e == 2 {
        lo.eq_mod(&up.mul_ref(&field.int(ext.p as i64)), prec).unwrap_or(false)
    } else {
        up.eq_mod(&lo.mul_ref(&field.int(ext.nonres as i64)), prec).unwrap_or(false)
    };
    if !scaled {
        return Ok(false);
    }
    if norm_one {
        let det = g.det();
        return Ok(det
            .sub_ref(&field.one())
            .certify_val_at_least(prec)
            .unwrap_or(false));
    }
    // induced torus: any invertible element of the pattern
    Ok(g.det().val()?.is_some())
}

fn desc_contains_mod_center(
    desc: &crate::building::MpDescriptor,
    g: &Mat<LocalFieldElement>,
    field: LocalField,
) -> Result<bool> {
    // center {+-1} for SL2; for GL2 the stabilizer of the reduced vertex is
    // Z GL2(O), so normalize an even determinant valuation away first
    let candidate = match desc.group {
        GroupKind::Gl(n) => {
            let v = match g.det().val()? {
                Some(v) => v,
                None => return Ok(false),
            };
            let ratio = v / rat_int(n as i64);
            if !ratio.is_integer() {
                // val(det) not divisible by n: no central normalization
                return Ok(false);
            }
            let k = ratio.to_integer();
            g.scale(&field.one().shift_pi(-k * field.e as i64))
        }
        GroupKind::Sl(_) => g.clone(),
    };
    if desc.contains(&candidate)? {
        return Ok(true);
    }
    let minus = candidate.scale(&field.int(-1));
    Ok(desc.contains(&minus)?)
}

/// The extended character phi-hat: theta on the torus part times the
/// root-space-killing extension on G_{x, r/2+}, evaluated on explicit
/// matrices.
#[derive(Clone, Debug)]
pub struct PhiHat {
    pub field: LocalField,
    pub theta: TorusCharacterData,
    pub point: BtTriple,
    pub depth: Rat,
    pub tilde_k: TildeK,
}

impl PhiHat {
    /// The S-eigenspace projection of Y - viewed as an element of E - for the
    /// embedded quadratic torus: the component of Y in Lie(S).
    pub fn project_to_torus(&self, y: &Mat<LocalFieldElement>) -> Result<LocalFieldElement> {
        let ext = match &self.theta {
            TorusCharacterData::NormOne(c) => c.ext,
            TorusCharacterData::Induced(c) => c.ext,
            _ => {
                return Err(YuError::DecompositionUnavailable(
                    "split tori handled elsewhere".into(),
                ))
            }
        };
        let f = self.field;
        let half = f.rational(1, 2);
        // a-part: (y11 + y22)/2; b-part: (y12 / scale + y21)/2 (ramified:
        // scale sits on the lower-left, cf. the embedding)
        let a = y[(0, 0)].add_ref(&y[(1, 1)]).mul_ref(&half);
        let b = if ext.e == 2 {
            // embedding [[a, b],[p b, a]]
            y[(0, 1)]
                .add_ref(&y[(1, 0)].mul_ref(&f.rational(1, ext.p as i64)))
                .mul_ref(&half)
        } else {
            // embedding [[a, n b],[b, a]]
            y[(0, 1)]
                .mul_ref(&f.rational(1, ext.nonres as i64))
                .add_ref(&y[(1, 0)])
                .mul_ref(&half)
        };
        let lift = |x: &LocalFieldElement| -> LocalFieldElement {
            match x.exact_coords() {
                Some(c) => LocalFieldElement::from_coords(
                    ext,
                    [c[0].clone(), zero_q(), zero_q(), zero_q()],
                ),
                None => {
                    // digit-level lift F -> E
                    let prec = ext.precision;
                    let mut acc = ext.zero().truncate(prec);
                    let lb = x.val_e_lower_bound();
                    if lb == i64::MAX {
                        return acc;
                    }
                    let hi = (prec / ext.e as i64).max(lb + 1);
                    for i in lb..hi {
                        if let Ok(dig) = x.shift_pi(-i).residue() {
                            let d = LocalFieldElement::from_residue(
                                ext,
                                Fq {
                                    p: ext.p,
                                    f: ext.f,
                                    nonres: ext.nonres,
                                    a: dig.a,
                                    b: 0,
                                },
                            );
                            acc = acc.add_ref(&d.shift_pi(i * ext.e as i64));
                        }
                    }
                    acc
                }
            }
        };
        let root = if ext.e == 2 {
            ext.uniformizer()
        } else {
            ext.w_gen()
        };
        Ok(lift(&a).add_ref(&lift(&b).mul_ref(&root)))
    }

    /// Evaluate phi-hat on g in G_{x, r/2+} (G_{n+1})_{[x]}: factor off a
    /// torus part, pair the rest with the dual element of theta.
    pub fn eval(&self, g: &Mat<LocalFieldElement>) -> Result<Cyc> {
        let plus_level = Level::plus(self.depth / rat_int(2));
        let desc = mp_descriptor(&self.point, plus_level);
        // find a torus transversal element s with s^{-1} g in G_{x, r/2+}
        let (ext, norm_one, wild) = match &self.theta {
            TorusCharacterData::NormOne(c) => (c.ext, true, c.wild_coeff.clone()),
            TorusCharacterData::Induced(c) => (c.ext, false, c.wild_coeff.clone()),
            _ => {
                return Err(YuError::DecompositionUnavailable(
                    "phi-hat implemented for elliptic rank-one tori".into(),
                ))
            }
        };
        let det_val = g.det().val()?.unwrap_or(rat_int(0));
        for s in self
            .tilde_k
            .torus_transversal(ext, norm_one, plus_level, det_val)
        {
            let sm = embed_ext(&s);
            if let Some(si) = sm.inverse() {
                let u = si.mul(g);
                if desc.contains(&u).unwrap_or(false) {
                    let theta_s = self.theta.eval_ext(&s)?;
                    let one = Mat::identity_like(2, &self.field.one());
                    let y = u.sub(&one);
                    let proj = self.project_to_torus(&y)?;
                    let phi_val = match &wild {
                        None => Cyc::one(),
                        Some(c) => {
                            let paired = c.mul_ref(&proj).trace_to_base();
                            let phi = crate::local_field::AdditiveCharacter::new(paired.field);
                            phi.eval(&paired)?
                        }
                    };
                    return Ok(theta_s * phi_val);
                }
            }
        }
        Err(YuError::DecompositionUnavailable(
            "element not in the domain of phi-hat".into(),
        ))
    }
}

pub fn extend_character_hat(
    theta: &TorusCharacterData,
    point: &BtTriple,
    depth: Rat,
    field: LocalField,
) -> PhiHat {
    let tilde_k = TildeK {
        field,
        point: point.clone(),
        deep_level: Some(Level::at(depth / rat_int(2))),
        last: match theta {
            TorusCharacterData::NormOne(c) => LeviDescriptor::NormOneTorus { ext: c.ext },
            TorusCharacterData::Induced(c) => LeviDescriptor::InducedTorus { ext: c.ext },
            TorusCharacterData::SplitMonomial { psi, .. } => LeviDescriptor::DiagonalTorus {
                n: {
                    let _ = psi;
                    2
                },
            },
        },
    };
    PhiHat {
        field,
        theta: theta.clone(),
        point: point.clone(),
        depth,
        tilde_k,
    }
}

/// One Heisenberg/Weil layer of the kappa assembly.
#[derive(Clone, Debug)]
pub struct KappaPart {
    pub depth: Rat,
    pub dim: usize,
    pub degree: usize,
    /// The extended character driving this layer, with the symplectic space
    /// and the Heisenberg/Weil representations it produces (absent when the
    /// quotient V_{r/2} is trivial).
    pub phi_hat: Option<PhiHat>,
    pub heisenberg: Option<HeisenbergRep>,
    pub weil_layer: Option<WeilRep>,
}

#[derive(Clone, Debug)]
pub struct KappaDescriptor {
    pub parts: Vec<KappaPart>,
    pub total_degree: usize,
    pub rho_tilde_degree: usize,
}

/// Basis lifts of V_{r/2} = G_{x,r/2} / (G_{x,r/2+} (G_{i+1})_{x,r/2}) for a
/// rank-one datum: the jumping root directions modulo the torus image.
pub fn v_half_basis(
    d: &YuDatum,
    field: LocalField,
    i: usize,
) -> Result<Vec<Mat<LocalFieldElement>>> {
    let r = d.depths[i];
    let half = r / rat_int(2);
    let x = &d.point;
    // no jump at r/2 means the quotient is trivial
    let jumps = jump_set(x, r.max(rat_int(2)));
    if !jumps.contains(&half) {
        return Ok(vec![]);
    }
    let coords = quotient_coordinates(x, half);
    // torus image dimension inside the quotient
    let ext = match &d.levi[i + 1] {
        LeviDescriptor::NormOneTorus { ext } | LeviDescriptor::InducedTorus { ext } => *ext,
        LeviDescriptor::Group(_) => {
            // G_{i+1} = G_i: V is trivial
            return Ok(vec![]);
        }
        LeviDescriptor::DiagonalTorus { .. } => {
            return Err(YuError::UnsupportedDescriptor(
                "split torus in kappa".into(),
            ))
        }
    };
    // S_{x, r/2}/S_{x, r/2+} image: spanned by the torus level directions;
    // compute F_q-coordinate vectors of torus generators and of root lifts,
    // and keep a complement basis of root-direction lifts.
    let level_e = (half * rat_int(ext.e as i64)).ceil().to_integer();
    let torus_dirs: Vec<LocalFieldElement> = if ext.f == 2 {
        vec![ext.one(), ext.w_gen()]
    } else {
        vec![ext.one()]
    };
    let mut span: Vec<Vec<Fq>> = Vec::new();
    for dir in &torus_dirs {
        let s = ext.one().add_ref(&dir.shift_pi(level_e));
        let s = if matches!(d.levi[i + 1], LeviDescriptor::NormOneTorus { .. }) {
            s.mul_ref(&s.conjugate().inv().unwrap())
        } else {
            s
        };
        let m = embed_ext(&s);
        if let Ok(c) = crate::building::quotient_coords_of(&m, x, half) {
            if c.iter().any(|v| !v.is_zero()) {
                span.push(c);
            }
        }
    }
    // candidate lifts: root directions, then split-diagonal directions
    // (the elliptic torus leaves a transverse diagonal line in the quotient)
    let mut candidates: Vec<Mat<LocalFieldElement>> = Vec::new();
    for (ii, jj, m) in coords.iter().filter(|(a, b, _)| a != b) {
        let mut g = Mat::identity_like(2, &field.one());
        g[(*ii, *jj)] = field.one().shift_pi(*m * field.e as i64);
        candidates.push(g);
    }
    if half.is_integer() {
        let m = half.to_integer() * field.e as i64;
        let u = field.one().add_ref(&field.one().shift_pi(m));
        match d.levi[0] {
            LeviDescriptor::Group(GroupKind::Gl(_)) => {
                for slot in 0..2usize {
                    let mut g = Mat::identity_like(2, &field.one());
                    g[(slot, slot)] = u.clone();
                    candidates.push(g);
                }
            }
            _ => {
                let g = Mat::from_rows(vec![
                    vec![u.clone(), field.zero()],
                    vec![field.zero(), u.inv()?],
                ]);
                candidates.push(g);
            }
        }
    }
    let mut lifts = Vec::new();
    let mut basis: Vec<Vec<Fq>> = span.clone();
    for g in candidates {
        let c = crate::building::quotient_coords_of(&g, x, half)?;
        if independent_of(&basis, &c) {
            basis.push(c);
            lifts.push(g);
        }
    }
    Ok(lifts)
}

fn independent_of(span: &[Vec<Fq>], v: &[Fq]) -> bool {
    if v.iter().all(|x| x.is_zero()) {
        return false;
    }
    // Gaussian elimination over F_q
    let mut rows: Vec<Vec<Fq>> = span.to_vec();
    rows.push(v.to_vec());
    let n = rows.len();
    let cols = v.len();
    let mut mat = rows.clone();
    let mut r = 0;
    for c in 0..cols {
        if let Some(pr) = (r..n - 1).find(|&i| !mat[i][c].is_zero()) {
            mat.swap(r, pr);
            let inv = mat[r][c].inv().unwrap();
            for x in mat[r].clone().iter().enumerate() {
                mat[r][x.0] = x.1.mul(&inv);
            }
            for i in 0..n {
                if i != r && !mat[i][c].is_zero() {
                    let f = mat[i][c];
                    for cc in 0..cols {
                        let t = f.mul(&mat[r][cc]);
                        mat[i][cc] = mat[i][cc].sub(&t);
                    }
                }
            }
            r += 1;
        }
    }
    let _ = r;
    // the last row is now reduced: if nonzero, v is independent
    mat[n - 1].iter().any(|x| !x.is_zero())
}

/// Assemble the kappa descriptor: one Heisenberg/Weil layer per positive
/// depth, with total degree prod p^{d_i/2}.
pub fn assemble_kappa(d: &YuDatum, field: LocalField) -> Result<KappaDescriptor> {
    let mut parts = Vec::new();
    let mut total = 1usize;
    let trivial_part = |depth: Rat| KappaPart {
        depth,
        dim: 0,
        degree: 1,
        phi_hat: None,
        heisenberg: None,
        weil_layer: None,
    };
    for i in 0..d.n() {
        if d.levi[i] == d.levi[i + 1] {
            parts.push(trivial_part(d.depths[i]));
            continue;
        }
        let lifts = v_half_basis(d, field, i)?;
        if lifts.is_empty() {
            parts.push(trivial_part(d.depths[i]));
            continue;
        }
        let theta = match &d.characters[i] {
            CharOfLevi::Torus(t) => t.clone(),
            CharOfLevi::DetChar(_) => {
                return Err(YuError::UnsupportedDescriptor(
                    "kappa layer needs a torus character".into(),
                ))
            }
        };
        let phi_hat = extend_character_hat(&theta, &d.point, d.depths[i], field);
        let evaluator = |m: &Mat<LocalFieldElement>| -> Cyc {
            phi_hat
                .eval(m)
                .expect("commutator lies in the phi-hat domain")
        };
        let space = commutator_form(&lifts, &evaluator, field.p)?;
        let dim = space.d;
        let heis = HeisenbergRep::new(space, 1)?;
        let degree = heis.degree();
        let weil_layer = if dim > 0 { Some(weil(&heis)?) } else { None };
        total *= degree;
        parts.push(KappaPart {
            depth: d.depths[i],
            dim,
            degree,
            phi_hat: Some(phi_hat.clone()),
            heisenberg: Some(heis),
            weil_layer,
        });
    }
    let rho_deg = d.rho.degree();
    Ok(KappaDescriptor {
        parts,
        total_degree: total,
        rho_tilde_degree: rho_deg * total,
    })
}

/// Refactorization equivalence of two Yu data on the same sequence, point
/// and depths: products of character restrictions agree on each filtration
/// level, and the rho-twists agree on the stabilizer.
pub fn refactorization_equivalent(d1: &YuDatum, d2: &YuDatum, field: LocalField) -> Result<bool> {
    if d1.levi != d2.levi || d1.depths != d2.depths || d1.point.x_bt != d2.point.x_bt {
        return Err(YuError::IncomparableData(
            "refactorization requires equal sequences, points and depths".into(),
        ));
    }
    let n = d1.n();
    // probes: torus elements by level and root-group elements in the deepest group
    let ext = d1.levi.last().and_then(|l| match l {
        LeviDescriptor::NormOneTorus { ext } | LeviDescriptor::InducedTorus { ext } => Some(*ext),
        _ => None,
    });
    // condition (i)
    for i in 0..n {
        let r_next = if i + 1 < n {
            d1.depths[i + 1]
        } else {
            rat_int(0)
        };
        let probes = levi_probes(&d1.levi[i + 1], ext, field, Level::plus(r_next))?;
        for g in &probes {
            let mut lhs = Cyc::one();
            let mut rhs = Cyc::one();
            for j in 0..=i {
                lhs = lhs * d1.characters[j].eval(g)?;
                rhs = rhs * d2.characters[j].eval(g)?;
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    // condition (ii): rho x prod phi_j on (G_{n+1})_{[x]}
    let probes = levi_probes(d1.levi.last().unwrap(), ext, field, Level::at(rat_int(0)))?;
    for g in &probes {
        let mut lhs = rho_char_value(&d1.rho, g)?;
        let mut rhs = rho_char_value(&d2.rho, g)?;
        for j in 0..n {
            lhs = lhs * d1.characters[j].eval(g)?;
            rhs = rhs * d2.characters[j].eval(g)?;
        }
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

fn rho_char_value(rho: &RhoHandle, g: &GroupElement) -> Result<Cyc> {
    match &rho.depth_zero_char {
        Some(t) => match g {
            GroupElement::Ext(s) => Ok(t.eval_ext(s)?),
            GroupElement::Matrix(_) => Err(YuError::UnsupportedDescriptor(
                "rho character evaluation needs torus elements".into(),
            )),
        },
        None => Ok(Cyc::one()),
    }
}

/// Generating probes for the compact filtration piece (G)_{x,level} of a
/// rank-one Levi: torus elements at each level plus root-group elements.
pub fn levi_probes(
    levi: &LeviDescriptor,
    ext: Option<LocalField>,
    field: LocalField,
    level: Level,
) -> Result<Vec<GroupElement>> {
    let mut out = Vec::new();
    match levi {
        LeviDescriptor::NormOneTorus { ext } | LeviDescriptor::InducedTorus { ext } => {
            let torus = if matches!(levi, LeviDescriptor::NormOneTorus { .. }) {
                TorusDescriptor::NormOne { ext: *ext }
            } else {
                TorusDescriptor::InducedQuadratic { ext: *ext }
            };
            let e = ext.e as i64;
            let start = if level.plus {
                (level.r * rat_int(e)).floor().to_integer() + 1
            } else {
                (level.r * rat_int(e)).ceil().to_integer()
            };
            for lvl in start..(ext.precision - 1).max(start + 1) {
                for p in crate::genericity::level_probes(&torus, lvl, field) {
                    out.push(GroupElement::Ext(p[0].clone()));
                }
            }
            if !level.is_positive() {
                for p in crate::genericity::level_probes(&torus, 0, field) {
                    out.push(GroupElement::Ext(p[0].clone()));
                }
            }
        }
        LeviDescriptor::Group(_) => {
            // root group and torus probes of G_{x, level} at the natural point
            let x = BtTriple::sl2_x1();
            for (i, j) in [(0usize, 1usize), (1, 0)] {
                let m = crate::building::mp_exponent(&x, i, j, level);
                let mut g = Mat::identity_like(2, &field.one());
                g[(i, j)] = field.one().shift_pi(m * field.e as i64);
                out.push(GroupElement::Matrix(g));
            }
            let k = level
                .ceil_shifted(rat_int(0))
                .max(if level.is_positive() { 1 } else { 0 });
            let u = if level.is_positive() {
                field.one().add_ref(&field.one().shift_pi(k))
            } else {
                field.int(Fq::generator(field.p, 1, 0).a as i64)
            };
            let ui = u.inv()?;
            out.push(GroupElement::Matrix(Mat::from_rows(vec![
                vec![u, field.zero()],
                vec![field.zero(), ui],
            ])));
        }
        LeviDescriptor::DiagonalTorus { .. } => {
            return Err(YuError::UnsupportedDescriptor("split torus probes".into()))
        }
    }
    let _ = ext;
    Ok(out)
}

/// A regular tame elliptic pair (S, theta) in rank one.
#[derive(Clone, Debug)]
pub struct TameEllipticPair {
    pub field: LocalField,
    /// Norm-one (SL2) or induced (GL2) torus character.
    pub theta: TorusCharacterData,
    /// Ambient group.
    pub ambient: GroupKind,
}

impl TameEllipticPair {
    pub fn ext(&self) -> Result<LocalField> {
        match &self.theta {
            TorusCharacterData::NormOne(c) => Ok(c.ext),
            TorusCharacterData::Induced(c) => Ok(c.ext),
            _ => Err(YuError::UnsupportedDescriptor(
                "pair torus must be elliptic".into(),
            )),
        }
    }

    /// The natural point of B(S) inside B(G).
    pub fn natural_point(&self) -> Result<BtTriple> {
        let ext = self.ext()?;
        Ok(match (self.ambient, ext.e) {
            (GroupKind::Sl(2), 2) => BtTriple::sl2_x2(),
            (GroupKind::Sl(2), _) => BtTriple::sl2_x1(),
            (GroupKind::Gl(2), _) => BtTriple::new(GroupKind::Gl(2), vec![rat_int(0); 2]),
            _ => {
                return Err(YuError::UnsupportedDescriptor(
                    "rank-one ambient only".into(),
                ))
            }
        })
    }
}

/// theta evaluated on the norm one-parameter circle N_{E/F}(alpha-check(u))
/// = u / sigma(u) at the pi_E-level k.
fn theta_on_norm_circle(theta: &TorusCharacterData, ext: LocalField, k: i64) -> Result<bool> {
    // true iff theta is TRIVIAL on the circle at level k
    let dirs: Vec<LocalFieldElement> = if ext.f == 2 {
        vec![ext.one(), ext.w_gen(), ext.w_gen().add_ref(&ext.one())]
    } else {
        vec![ext.one(), ext.int(2), ext.int(3)]
    };
    for dir in dirs {
        let u = ext.one().add_ref(&dir.shift_pi(k));
        let z = u.mul_ref(&u.conjugate().inv().unwrap());
        let v = theta.eval_ext(&z)?;
        if !v.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Phi_r as a function of the level: in rank one either empty or {+-alpha}.
pub fn phi_r(pair: &TameEllipticPair, level: Level) -> Result<bool> {
    // returns true iff Phi_level = {+-alpha} (the full root system)
    let ext = pair.ext()?;
    let e = ext.e as i64;
    let k = if level.plus {
        (level.r * rat_int(e)).floor().to_integer() + 1
    } else {
        (level.r * rat_int(e)).ceil().to_integer()
    };
    theta_on_norm_circle(&pair.theta, ext, k.max(1))
}

#[derive(Clone, Debug)]
pub struct JumpData {
    /// r_1 > ... > r_n.
    pub depths: Vec<Rat>,
    /// Phi_{r_i +} is full for each i (true) / empty (false), plus the
    /// terminal Phi_{0+}.
    pub phi_after: Vec<bool>,
    pub phi_zero_plus: bool,
}

/// The jump levels of Phi_r together with the depth of theta (Eq. (jumps));
/// returns the twisted Levi data for the datum assembly.
pub fn phi_r_jumps(pair: &TameEllipticPair) -> Result<JumpData> {
    let ext = pair.ext()?;
    let field = pair.field;
    let (depth, trivial) = char_depth(&pair.theta, field)?;
    let e = ext.e as i64;
    // candidate grid: k/e for k = 1 .. e * (depth + 1)
    let mut candidates: Vec<Rat> = Vec::new();
    let kmax = ((depth + rat_int(1)) * rat_int(e))
        .ceil()
        .to_integer()
        .max(2);
    for k in 1..=kmax {
        candidates.push(Rat::new(k, e));
    }
    let mut jumps = Vec::new();
    for &r in &candidates {
        let at = phi_r(pair, Level::at(r))?;
        let after = phi_r(pair, Level::plus(r))?;
        if at != after {
            jumps.push(r);
        }
    }
    if !trivial && depth.is_positive() && !jumps.contains(&depth) {
        jumps.push(depth);
    }
    jumps.sort();
    jumps.reverse();
    let phi_after = jumps
        .iter()
        .map(|&r| phi_r(pair, Level::plus(r)))
        .collect::<Result<Vec<bool>>>()?;
    let phi_zero_plus = phi_r(pair, Level::plus(rat_int(0)))?;
    Ok(JumpData {
        depths: jumps,
        phi_after,
        phi_zero_plus,
    })
}

/// Split a quadratic-extension coefficient into symmetric and skew parts.
pub fn sym_skew_split(c: &LocalFieldElement) -> (LocalFieldElement, LocalFieldElement) {
    let half = c.field.rational(1, 2);
    let sym = c.add_ref(&c.conjugate()).mul_ref(&half);
    let skew = c.sub_ref(&c.conjugate()).mul_ref(&half);
    (sym, skew)
}

#[derive(Clone, Debug)]
pub struct HoweFactorization {
    pub levi: Vec<LeviDescriptor>,
    pub depths: Vec<Rat>,
    pub characters: Vec<CharOfLevi>,
    /// The depth-zero boundary character phi_{n+1} of S(F).
    pub depth_zero: TorusCharacterData,
}

/// Howe factorization of a rank-one pair: theta = prod phi_i | S(F) with
/// phi_i generic of depth r_i on the twisted Levi sequence determined by the
/// Phi_r jumps, and a depth-zero remainder.
pub fn howe_factorization(pair: &TameEllipticPair) -> Result<HoweFactorization> {
    let ext = pair.ext()?;
    let jumps = phi_r_jumps(pair)?;
    let n = jumps.depths.len();
    let ambient = LeviDescriptor::Group(pair.ambient);
    let torus = match &pair.theta {
        TorusCharacterData::NormOne(_) => LeviDescriptor::NormOneTorus { ext },
        TorusCharacterData::Induced(_) => LeviDescriptor::InducedTorus { ext },
        _ => return Err(YuError::UnsupportedDescriptor("split pair".into())),
    };
    // twisted Levi sequence: G_i has root system Phi_{r_i +}
    let mut levi = Vec::new();
    for i in 0..n {
        levi.push(if jumps.phi_after[i] {
            ambient.clone()
        } else {
            torus.clone()
        });
    }
    levi.push(if jumps.phi_zero_plus {
        ambient.clone()
    } else {
        torus.clone()
    });
    if levi.first() != Some(&ambient) {
        return Err(YuError::NoFactorization(
            "Phi_{r_1 +} must be the full root system".into(),
        ));
    }
    // wild coefficient split
    let (tame_exp, wild, is_norm_one) = match &pair.theta {
        TorusCharacterData::NormOne(c) => (c.tame_exp, c.wild_coeff.clone(), true),
        TorusCharacterData::Induced(c) => (c.tame_exp, c.wild_coeff.clone(), false),
        _ => unreachable!(),
    };
    let mut characters: Vec<CharOfLevi> = Vec::new();
    // slice the wild coefficient by valuation: the torus slice (when the
    // deepest Levi is S) takes the digits with val >= -r_S, and each
    // det-slice takes the shallower digits of its depth range, which must
    // be symmetric (the skew part of c cannot sit on a full-group slice)
    let torus_slice_depth: Option<Rat> = (0..n)
        .find(|&i| levi[i + 1].is_torus())
        .map(|i| jumps.depths[i]);
    let (c_torus, c_det) = match (&wild, torus_slice_depth) {
        (None, _) => (None, None),
        (Some(c), None) => (None, Some(c.clone())),
        (Some(c), Some(r_s)) => {
            let boundary = (-(r_s) * rat_int(ext.e as i64)).ceil().to_integer();
            let low = c
                .truncation_as_exact(boundary)
                .ok_or_else(|| YuError::NoFactorization("wild coefficient must be exact".into()))?;
            let high = c.sub_ref(&low);
            let low_part = if low.is_exact_zero() { None } else { Some(low) };
            (Some(high), low_part)
        }
    };
    if let Some(cd) = &c_det {
        let (_, skew_low) = sym_skew_split(cd);
        if !skew_low.is_exact_zero() {
            return Err(YuError::NoFactorization(
                "skew component at a level where the Levi is the full group".into(),
            ));
        }
    }
    for i in 0..n {
        let r = jumps.depths[i];
        match &levi[i + 1] {
            LeviDescriptor::NormOneTorus { .. } | LeviDescriptor::InducedTorus { .. } => {
                let coeff = c_torus.clone().ok_or_else(|| {
                    YuError::NoFactorization("positive depth requires a wild part".into())
                })?;
                let chi = if is_norm_one {
                    TorusCharacterData::NormOne(NormOneChar {
                        ext,
                        tame_exp: 0,
                        wild_coeff: Some(coeff),
                    })
                } else {
                    TorusCharacterData::Induced(ExtChar {
                        ext,
                        on_uniformizer: Cyc::one(),
                        tame_exp: 0,
                        wild_coeff: Some(coeff),
                    })
                };
                characters.push(CharOfLevi::Torus(chi));
            }
            LeviDescriptor::Group(_) => {
                let cd = c_det.clone().ok_or_else(|| {
                    YuError::NoFactorization(format!(
                        "full-group slice at depth {r} has no symmetric component"
                    ))
                })?;
                // psi on F^x: the symmetric coefficient descends through
                // Tr(c log s) = c log N(s)
                let (sym, _) = sym_skew_split(&cd);
                let c_f = sym.retract_to_base();
                let psi = ExtChar {
                    ext: pair.field,
                    on_uniformizer: Cyc::one(),
                    tame_exp: 0,
                    wild_coeff: Some(c_f),
                };
                characters.push(CharOfLevi::DetChar(psi));
            }
            LeviDescriptor::DiagonalTorus { .. } => unreachable!(),
        }
    }
    // depth-zero remainder: tame and uniformizer data of theta
    let depth_zero = match &pair.theta {
        TorusCharacterData::NormOne(_) => TorusCharacterData::NormOne(NormOneChar {
            ext,
            tame_exp,
            wild_coeff: None,
        }),
        TorusCharacterData::Induced(c) => TorusCharacterData::Induced(ExtChar {
            ext,
            on_uniformizer: c.on_uniformizer.clone(),
            tame_exp,
            wild_coeff: None,
        }),
        _ => unreachable!(),
    };
    let hf = HoweFactorization {
        levi,
        depths: jumps.depths,
        characters,
        depth_zero,
    };
    verify_howe_product(pair, &hf)?;
    Ok(hf)
}

/// Exact check that prod phi_i | S(F) = theta on topological generators.
fn verify_howe_product(pair: &TameEllipticPair, hf: &HoweFactorization) -> Result<()> {
    let ext = pair.ext()?;
    let torus = match &pair.theta {
        TorusCharacterData::NormOne(_) => TorusDescriptor::NormOne { ext },
        _ => TorusDescriptor::InducedQuadratic { ext },
    };
    let mut gens: Vec<LocalFieldElement> = Vec::new();
    for lvl in 0..(ext.precision - 2).max(1) {
        for p in crate::genericity::level_probes(&torus, lvl, pair.field) {
            gens.push(p[0].clone());
        }
    }
    if matches!(&pair.theta, TorusCharacterData::Induced(_)) {
        gens.push(ext.uniformizer());
    }
    for s in &gens {
        let theta_val = pair.theta.eval_ext(s)?;
        let mut prod = hf.depth_zero.eval_ext(s)?;
        for chi in &hf.characters {
            prod = prod * chi.eval(&GroupElement::Ext(s.clone()))?;
        }
        if prod != theta_val {
            return Err(YuError::NoFactorization(format!(
                "product check failed on a generator: {prod:?} vs {theta_val:?}"
            )));
        }
    }
    Ok(())
}

/// The normalizer quotient N_G(S)(F)/S(F) in rank one: order 1 or 2, with an
/// explicit witness when nontrivial.
pub fn normalizer_coset_order(
    pair: &TameEllipticPair,
) -> Result<(usize, Option<Mat<LocalFieldElement>>)> {
    let ext = pair.ext()?;
    let field = pair.field;
    match pair.ambient {
        GroupKind::Gl(2) => {
            // diag(1, -1) conjugates both embedded models by the Galois action
            let w = Mat::from_rows(vec![
                vec![field.one(), field.zero()],
                vec![field.zero(), field.int(-1)],
            ]);
            let _ = ext;
            Ok((2, Some(w)))
        }
        GroupKind::Sl(2) => {
            // need det 1: solvability of a^2 - (disc) c^2 = -1 over F
            if ext.e == 1 {
                // unramified: units are norms; Hensel-lift a residue solution
                let n = ext.nonres;
                let p = field.p;
                let mut sol = None;
                for a0 in 1..p {
                    for c0 in 0..p {
                        // a0^2 - n c0^2 = -1 mod p, with a0 a unit so the
                        // Newton lift below converges
                        if (a0 * a0 + 1) % p == (n * c0 % p * c0) % p {
                            sol = Some((a0, c0));
                        }
                    }
                }
                let (a0, c0) = sol.expect("unramified norm equation solvable mod p");
                // Newton-lift a: f(a) = a^2 - n c^2 + 1 with c fixed
                let prec = field.precision;
                let c = field.int(c0 as i64);
                let mut a = field.int(a0 as i64).truncate(prec);
                let nc2 = field.int(n as i64).mul_ref(&c).mul_ref(&c);
                for _ in 0..prec + 2 {
                    let fa = a
                        .mul_ref(&a)
                        .sub_ref(&nc2)
                        .add_ref(&field.one())
                        .truncate(prec);
                    let da = a.mul_ref(&field.int(2));
                    a = a.sub_ref(&fa.mul_ref(&da.inv()?)).truncate(prec);
                }
                // witness [[a, -n c],[c, -a]]: conjugation inverts the torus
                let w = Mat::from_rows(vec![
                    vec![a.clone(), c.mul_ref(&field.int(-(n as i64)))],
                    vec![c.clone(), a.neg_ref()],
                ]);
                Ok((2, Some(w)))
            } else {
                // ramified: -1 must be a norm, i.e. a square mod p
                if crate::cyclotomic::legendre(-1, field.p) == 1 {
                    // witness diag(i, -i) with i = sqrt(-1)
                    let p = field.p;
                    let a0 = (1..p).find(|a| (a * a + 1) % p == 0).unwrap();
                    let prec = field.precision;
                    let mut a = field.int(a0 as i64).truncate(prec);
                    for _ in 0..prec + 2 {
                        let fa = a.mul_ref(&a).add_ref(&field.one()).truncate(prec);
                        let da = a.mul_ref(&field.int(2));
                        a = a.sub_ref(&fa.mul_ref(&da.inv()?)).truncate(prec);
                    }
                    let w = Mat::from_rows(vec![
                        vec![a.clone(), field.zero()],
                        vec![field.zero(), a.neg_ref()],
                    ]);
                    Ok((2, Some(w)))
                } else {
                    Ok((1, None))
                }
            }
        }
        _ => Err(YuError::UnsupportedDescriptor(
            "rank-one groups only".into(),
        )),
    }
}

/// Regular tame elliptic pair test: ellipticity and tameness are structural;
/// condition (2) checks the inertia orbit of Phi_{0+}; condition (3) checks
/// the triviality of the stabilizer of theta|_{S(F)_0} in N_{G^0}(S)(F)/S(F).
pub fn is_regular_tame_elliptic(pair: &TameEllipticPair) -> Result<bool> {
    let ext = pair.ext()?;
    let jumps = phi_r_jumps(pair)?;
    // condition (2): inertia preserves a positive system of Phi_{0+}
    if jumps.phi_zero_plus {
        // Phi_{0+} = {+-alpha}: inertia acts trivially iff E/F is unramified
        if ext.e == 2 {
            return Ok(false);
        }
        // G^0 is the full group: stabilizer condition uses the real normalizer
        let (order, witness) = normalizer_coset_order(pair)?;
        if order == 2 {
            if theta_zero_fixed_by_inversion(pair)? {
                return Ok(false);
            }
        }
        let _ = witness;
        Ok(true)
    } else {
        // G^0 = S: N_{G^0}(S)/S is trivial, condition (3) is vacuous
        Ok(true)
    }
}

/// Does theta restricted to S(F)_0 agree with its twist by the nontrivial
/// Weyl element (which acts by the Galois conjugation on the torus)?
fn theta_zero_fixed_by_inversion(pair: &TameEllipticPair) -> Result<bool> {
    let ext = pair.ext()?;
    let torus = match &pair.theta {
        TorusCharacterData::NormOne(_) => TorusDescriptor::NormOne { ext },
        _ => TorusDescriptor::InducedQuadratic { ext },
    };
    for lvl in 0..(ext.precision - 2).max(1) {
        for p in crate::genericity::level_probes(&torus, lvl, pair.field) {
            let s = &p[0];
            let lhs = pair.theta.eval_ext(s)?;
            let rhs = pair.theta.eval_ext(&s.conjugate())?;
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Build the Yu datum attached to a regular pair: Howe factorization plus
/// the Deligne-Lusztig handle for the depth-zero part.
pub fn yu_datum_from_pair(pair: &TameEllipticPair) -> Result<YuDatum> {
    if !is_regular_tame_elliptic(pair)? {
        return Err(YuError::UnsupportedDescriptor(
            "pair is not regular tame elliptic".into(),
        ));
    }
    let hf = howe_factorization(pair)?;
    let point = pair.natural_point()?;
    let last_is_torus = hf.levi.last().map(|l| l.is_torus()).unwrap_or(false);
    let rho = RhoHandle {
        label: format!("+-R_(Sbar, phibar_{})", hf.depths.len() + 1),
        depth_zero_char: Some(hf.depth_zero.clone()),
        cert: if last_is_torus {
            CuspidalCert::TorusAutomatic
        } else {
            CuspidalCert::Declared
        },
    };
    let d = YuDatum {
        field: pair.field,
        levi: hf.levi.clone(),
        point,
        depths: hf.depths.clone(),
        characters: hf.characters.clone(),
        rho,
    };
    Ok(d)
}
