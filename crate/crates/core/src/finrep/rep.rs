//! Matrix representations over exact cyclotomic scalars: induction, Mackey
//! decomposition, the intertwining criterion, cuspidality and isotypic
//! constituent extraction.

use super::group::{FinRepError, FiniteGroup, Result};
use crate::cyclotomic::Cyc;
use crate::matrix::Mat;
use num_rational::BigRational;

/// A representation of a subgroup `domain` of an ambient group, by explicit
/// matrices with exact cyclotomic entries.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    /// Sorted element indices of the subgroup H the matrices are defined on.
    pub domain: Vec<u32>,
    pub degree: usize,
    /// mats[i] is the matrix of domain[i].
    pub mats: Vec<Mat<Cyc>>,
}

impl MatrixRep {
    pub fn position(&self, g: u32) -> Option<usize> {
        self.domain.binary_search(&g).ok()
    }

    pub fn mat(&self, g: u32) -> &Mat<Cyc> {
        &self.mats[self.position(g).expect("element in the domain")]
    }

    /// One-dimensional representation from a character value map.
    pub fn linear(domain: Vec<u32>, values: Vec<Cyc>) -> MatrixRep {
        let mats = values
            .into_iter()
            .map(|v| Mat {
                rows: 1,
                cols: 1,
                data: vec![v],
            })
            .collect();
        MatrixRep {
            domain,
            degree: 1,
            mats,
        }
    }

    pub fn trivial(domain: Vec<u32>) -> MatrixRep {
        let n = domain.len();
        MatrixRep::linear(domain, vec![Cyc::one(); n])
    }

    /// Verify multiplicativity on the full domain (exact).
    pub fn verify(&self, group: &FiniteGroup) -> bool {
        for (i, &g) in self.domain.iter().enumerate() {
            for (j, &h) in self.domain.iter().enumerate() {
                let gh = group.mul(g, h);
                let pos = match self.position(gh) {
                    Some(p) => p,
                    None => return false,
                };
                if self.mats[i].mul(&self.mats[j]) != self.mats[pos] {
                    return false;
                }
            }
        }
        true
    }

    /// Character as a map element-index -> value (on the domain only).
    pub fn character(&self) -> Vec<(u32, Cyc)> {
        self.domain
            .iter()
            .zip(&self.mats)
            .map(|(&g, m)| (g, m.trace()))
            .collect()
    }

    pub fn character_value(&self, g: u32) -> Cyc {
        self.mat(g).trace()
    }

    /// The conjugate representation ^x rho on x H x^{-1}.
    pub fn conjugated(&self, group: &FiniteGroup, x: u32) -> MatrixRep {
        let mut pairs: Vec<(u32, Mat<Cyc>)> = self
            .domain
            .iter()
            .zip(&self.mats)
            .map(|(&h, m)| (group.conj(h, x), m.clone()))
            .collect();
        pairs.sort_by_key(|(g, _)| *g);
        MatrixRep {
            domain: pairs.iter().map(|(g, _)| *g).collect(),
            degree: self.degree,
            mats: pairs.into_iter().map(|(_, m)| m).collect(),
        }
    }

    pub fn restrict(&self, sub: &[u32]) -> MatrixRep {
        MatrixRep {
            domain: sub.to_vec(),
            degree: self.degree,
            mats: sub.iter().map(|&g| self.mat(g).clone()).collect(),
        }
    }
}

/// Exact inner product (1/|H|) sum_h f1(h) conj(f2(h)) of two character
/// fragments defined on the same subgroup.
pub fn inner_product(values1: &[Cyc], values2: &[Cyc]) -> BigRational {
    assert_eq!(values1.len(), values2.len());
    let mut s = Cyc::zero();
    for (a, b) in values1.iter().zip(values2) {
        s += a.clone() * b.conj();
    }
    let avg = s * Cyc::from_ratio(1, values1.len() as i64);
    avg.to_rational()
        .expect("inner products of characters are rational")
}

/// Induced representation Ind_H^G rho via the coset model: block (i, j) of
/// Ind(g) is rho(t_i^{-1} g t_j) when that element lies in H, else zero.
pub fn induce(group: &FiniteGroup, rho: &MatrixRep) -> Result<MatrixRep> {
    if !group.is_subgroup(&rho.domain) {
        return Err(FinRepError::NotASubgroup);
    }
    let reps = group.left_coset_reps(&rho.domain);
    let m = reps.len();
    let d = rho.degree;
    let deg = m * d;
    let domain: Vec<u32> = group.all_elements();
    let mut mats = Vec::with_capacity(domain.len());
    for &g in &domain {
        let mut big = Mat::filled(deg, deg, Cyc::zero());
        for (i, &ti) in reps.iter().enumerate() {
            for (j, &tj) in reps.iter().enumerate() {
                let h = group.mul(group.mul(group.inv(ti), g), tj);
                if let Some(pos) = rho.position(h) {
                    let block = &rho.mats[pos];
                    for r in 0..d {
                        for c in 0..d {
                            big[(i * d + r, j * d + c)] = block[(r, c)].clone();
                        }
                    }
                }
            }
        }
        mats.push(big);
    }
    Ok(MatrixRep {
        domain,
        degree: deg,
        mats,
    })
}

/// Induced character by the averaging formula, without building matrices:
/// chi_Ind(g) = (1/|H|) sum_{x in G, x^{-1} g x in H} chi(x^{-1} g x).
pub fn induced_character_within(
    group: &FiniteGroup,
    ambient: &[u32],
    sub: &[u32],
    chi: &dyn Fn(u32) -> Cyc,
) -> Vec<Cyc> {
    use std::collections::HashSet;
    let hset: HashSet<u32> = sub.iter().copied().collect();
    let h_ord = sub.len() as i64;
    ambient
        .iter()
        .map(|&g| {
            let mut s = Cyc::zero();
            for &x in ambient {
                let c = group.mul(group.mul(group.inv(x), g), x);
                if hset.contains(&c) {
                    s += chi(c);
                }
            }
            s * Cyc::from_ratio(1, h_ord)
        })
        .collect()
}

/// Verify the Mackey decomposition at the level of exact characters:
/// Res_{K'} Ind_K^G rho = sum over K'\G/K of Ind_{^gK cap K'}^{K'} (^g rho).
pub fn mackey_check(
    group: &FiniteGroup,
    k: &[u32],
    kp: &[u32],
    chi_on_k: &dyn Fn(u32) -> Cyc,
) -> bool {
    let all = group.all_elements();
    let lhs_full = induced_character_within(group, &all, k, chi_on_k);
    let lhs: Vec<Cyc> = kp.iter().map(|&g| lhs_full[g as usize].clone()).collect();
    let mut rhs = vec![Cyc::zero(); kp.len()];
    for g in group.double_coset_reps(kp, k) {
        let gk = group.conj_subgroup(k, g);
        let inter = group.intersect(&gk, kp);
        let ginv = group.inv(g);
        let chi_conj = |h: u32| chi_on_k(group.conj(h, ginv));
        let piece = induced_character_within(group, kp, &inter, &chi_conj);
        for (acc, v) in rhs.iter_mut().zip(piece) {
            *acc += v;
        }
    }
    lhs == rhs
}

/// The intertwining criterion: with rho irreducible on K, returns true iff
/// every g outside K fails to intertwine, i.e.
/// Hom_{^gK cap K}(^g rho, rho) = 0 for all double-coset representatives
/// g not in K. Cross-checked against <chi_Ind, chi_Ind> = 1.
pub fn intertwining_criterion(
    group: &FiniteGroup,
    k: &[u32],
    chi_on_k: &dyn Fn(u32) -> Cyc,
) -> Result<bool> {
    // irreducibility of rho over K
    let chi_vals: Vec<Cyc> = k.iter().map(|&h| chi_on_k(h)).collect();
    let norm = inner_product(&chi_vals, &chi_vals);
    if norm != BigRational::from_integer(1.into()) {
        return Err(FinRepError::NotIrreducible);
    }
    let kset: std::collections::HashSet<u32> = k.iter().copied().collect();
    let mut all_zero = true;
    for g in group.double_coset_reps(k, k) {
        if kset.contains(&g) {
            continue;
        }
        let gk = group.conj_subgroup(k, g);
        let inter = group.intersect(&gk, k);
        let ginv = group.inv(g);
        let v1: Vec<Cyc> = inter
            .iter()
            .map(|&h| chi_on_k(group.conj(h, ginv)))
            .collect();
        let v2: Vec<Cyc> = inter.iter().map(|&h| chi_on_k(h)).collect();
        if inner_product(&v1, &v2) != BigRational::from_integer(0.into()) {
            all_zero = false;
        }
    }
    // cross-check: criterion holds iff the induced character is irreducible
    let all = group.all_elements();
    let ind = induced_character_within(group, &all, k, chi_on_k);
    let ind_norm = inner_product(&ind, &ind);
    assert_eq!(
        all_zero,
        ind_norm == BigRational::from_integer(1.into()),
        "intertwining criterion must match <Ind, Ind> = 1"
    );
    Ok(all_zero)
}

/// Decide cuspidality of a representation of SL2(F_q) or GL2(F_q): true iff
/// the unipotent-invariant subspace vanishes for the upper-triangular
/// unipotent radical (Borel suffices in rank one). The dimension is computed
/// both by the character inner product and via the explicit averaging
/// projector; the two must agree.
pub fn is_cuspidal(group: &FiniteGroup, rho: &MatrixRep) -> Result<bool> {
    let q = match group.kind {
        super::group::ElementKind::Mat2 { q } => q,
        _ => return Err(FinRepError::UnsupportedGroup(group.name.clone())),
    };
    if ![2, 3, 5, 7].contains(&q) {
        return Err(FinRepError::UnsupportedGroup(format!("q = {q}")));
    }
    let u = group
        .index_of(&[1, 1, 0, 1])
        .ok_or_else(|| FinRepError::UnsupportedGroup("no unipotent generator".into()))?;
    let n_sub = group.subgroup_closure(&[u]);
    // character route
    let chi: Vec<Cyc> = n_sub.iter().map(|&g| rho.character_value(g)).collect();
    let ones = vec![Cyc::one(); n_sub.len()];
    let dim_char = inner_product(&chi, &ones);
    // projector route: rank of (1/|N|) sum rho(n)
    let mut p = Mat::filled(rho.degree, rho.degree, Cyc::zero());
    for &g in &n_sub {
        p = p.add(rho.mat(g));
    }
    let p = p.scale(&Cyc::from_ratio(1, n_sub.len() as i64));
    let dim_proj = p.rank();
    assert_eq!(
        dim_char,
        BigRational::from_integer((dim_proj as i64).into()),
        "character and projector fixed-space dimensions disagree"
    );
    Ok(dim_proj == 0)
}

/// Extract the isotypic constituent of `rho` for the irreducible character
/// `chi` (values per element of the full group): returns the subrepresentation
/// on the image of the projector, with exact basis change. The result has
/// degree deg(chi) * multiplicity.
pub fn irreducible_constituent(
    group: &FiniteGroup,
    rho: &MatrixRep,
    chi: &[Cyc],
    chi_degree: u64,
) -> Result<MatrixRep> {
    assert_eq!(rho.domain.len(), group.order());
    let n = group.order() as i64;
    let mut p = Mat::filled(rho.degree, rho.degree, Cyc::zero());
    for (i, &g) in rho.domain.iter().enumerate() {
        let coeff = chi[g as usize].conj() * Cyc::from_ratio(chi_degree as i64, n);
        p = p.add(&rho.mats[i].scale(&coeff));
    }
    let basis = p.column_space_basis();
    if basis.is_empty() {
        return Err(FinRepError::IntertwinerNotFound);
    }
    let d = basis.len();
    // matrix B with columns the basis vectors
    let mut b = Mat::filled(rho.degree, d, Cyc::zero());
    for (j, v) in basis.iter().enumerate() {
        for i in 0..rho.degree {
            b[(i, j)] = v[i].clone();
        }
    }
    let mats = rho
        .mats
        .iter()
        .map(|m| {
            let img = m.mul(&b);
            solve_in_basis(&b, &img)
        })
        .collect::<Vec<_>>();
    Ok(MatrixRep {
        domain: rho.domain.clone(),
        degree: d,
        mats,
    })
}

/// Solve B X = Y column-wise (B has full column rank), exactly.
fn solve_in_basis(b: &Mat<Cyc>, y: &Mat<Cyc>) -> Mat<Cyc> {
    let rows = b.rows;
    let d = b.cols;
    let cols = y.cols;
    // Gaussian elimination on [B | Y]
    let mut aug = Mat::filled(rows, d + cols, Cyc::zero());
    for i in 0..rows {
        for j in 0..d {
            aug[(i, j)] = b[(i, j)].clone();
        }
        for j in 0..cols {
            aug[(i, d + j)] = y[(i, j)].clone();
        }
    }
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..d {
        if let Some(r) = (row..rows).find(|&r| !aug[(r, col)].is_zero()) {
            for c in 0..(d + cols) {
                let tmp = aug[(row, c)].clone();
                aug[(row, c)] = aug[(r, c)].clone();
                aug[(r, c)] = tmp;
            }
            let pinv = aug[(row, col)].inv().unwrap();
            for c in 0..(d + cols) {
                aug[(row, c)] = aug[(row, c)].clone() * pinv.clone();
            }
            for r2 in 0..rows {
                if r2 != row && !aug[(r2, col)].is_zero() {
                    let f = aug[(r2, col)].clone();
                    for c in 0..(d + cols) {
                        let t = f.clone() * aug[(row, c)].clone();
                        aug[(r2, c)] = aug[(r2, c)].clone() - t;
                    }
                }
            }
            pivots.push((row, col));
            row += 1;
        }
    }
    assert_eq!(pivots.len(), d, "basis must have full column rank");
    let mut x = Mat::filled(d, cols, Cyc::zero());
    for (r, c) in pivots {
        for j in 0..cols {
            x[(c, j)] = aug[(r, d + j)].clone();
        }
    }
    x
}
