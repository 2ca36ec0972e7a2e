//! Root systems with coroots, Weyl groups by closure enumeration, and
//! concrete Chevalley pinnings for type A as elementary matrices.

use crate::matrix::Mat;
use crate::rat::{rat_int, Rat};
use num_traits::Zero;
use std::collections::VecDeque;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootDataError {
    #[error("unsupported Cartan type {0}")]
    UnsupportedType(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    G,
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            CartanType::A => 'A',
            CartanType::B => 'B',
            CartanType::C => 'C',
            CartanType::D => 'D',
            CartanType::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// A reduced root system realized in an ambient integer lattice, with
/// explicit (possibly fractional) coroot vectors and a simple system.
#[derive(Clone, Debug)]
pub struct RootSystem {
    pub cartan: CartanType,
    pub rank: usize,
    /// Dimension of the ambient lattice the roots live in.
    pub dim: usize,
    pub roots: Vec<Vec<i64>>,
    pub coroots: Vec<Vec<Rat>>,
    /// Indices of the simple roots, in lexicographic tie-broken order.
    pub simple: Vec<usize>,
}

pub fn pairing(chi: &[i64], x: &[Rat]) -> Result<Rat, RootDataError> {
    if chi.len() != x.len() {
        return Err(RootDataError::DimensionMismatch(format!(
            "{} vs {}",
            chi.len(),
            x.len()
        )));
    }
    Ok(chi.iter().zip(x).map(|(&c, v)| v * rat_int(c)).sum())
}

fn pairing_int(chi: &[i64], x: &[Rat]) -> Rat {
    chi.iter().zip(x).map(|(&c, v)| v * rat_int(c)).sum()
}

impl RootSystem {
    pub fn new(cartan: CartanType, rank: usize) -> Result<RootSystem, RootDataError> {
        let (dim, mut roots): (usize, Vec<Vec<i64>>) = match (cartan, rank) {
            (CartanType::A, n) if n >= 1 => {
                let dim = n + 1;
                let mut roots = Vec::new();
                for i in 0..dim {
                    for j in 0..dim {
                        if i != j {
                            let mut v = vec![0i64; dim];
                            v[i] = 1;
                            v[j] = -1;
                            roots.push(v);
                        }
                    }
                }
                (dim, roots)
            }
            (CartanType::B, n) if n >= 2 => {
                let mut roots = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            let mut v = vec![0i64; n];
                            v[i] = si;
                            v[j] = sj;
                            roots.push(v);
                        }
                    }
                    for s in [1, -1] {
                        let mut v = vec![0i64; n];
                        v[i] = s;
                        roots.push(v);
                    }
                }
                (n, roots)
            }
            (CartanType::C, n) if n >= 2 => {
                let mut roots = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            let mut v = vec![0i64; n];
                            v[i] = si;
                            v[j] = sj;
                            roots.push(v);
                        }
                    }
                    for s in [2, -2] {
                        let mut v = vec![0i64; n];
                        v[i] = s;
                        roots.push(v);
                    }
                }
                (n, roots)
            }
            (CartanType::D, n) if n >= 3 => {
                let mut roots = Vec::new();
                for i in 0..n {
                    for j in (i + 1)..n {
                        for (si, sj) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                            let mut v = vec![0i64; n];
                            v[i] = si;
                            v[j] = sj;
                            roots.push(v);
                        }
                    }
                }
                (n, roots)
            }
            (CartanType::G, 2) => {
                // Sum-zero model in Z^3: short e_i - e_j, long +-(2e_i - e_j - e_k).
                let mut roots = Vec::new();
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            let mut v = vec![0i64; 3];
                            v[i] = 1;
                            v[j] = -1;
                            roots.push(v);
                        }
                    }
                }
                for i in 0..3usize {
                    let mut v = vec![-1i64; 3];
                    v[i] = 2;
                    roots.push(v.clone());
                    roots.push(v.iter().map(|x| -x).collect());
                }
                (3, roots)
            }
            _ => {
                return Err(RootDataError::UnsupportedType(format!("{cartan}{rank}")));
            }
        };
        roots.sort();
        roots.dedup();
        let coroots: Vec<Vec<Rat>> = roots
            .iter()
            .map(|r| {
                let len2: i64 = r.iter().map(|x| x * x).sum();
                r.iter().map(|&x| Rat::new(2 * x, len2)).collect()
            })
            .collect();
        let mut rs = RootSystem {
            cartan,
            rank,
            dim,
            roots,
            coroots,
            simple: vec![],
        };
        rs.simple = rs.find_simple();
        debug_assert!(rs
            .roots
            .iter()
            .zip(&rs.coroots)
            .all(|(a, ac)| pairing_int(a, ac) == rat_int(2)));
        Ok(rs)
    }

    /// Positivity with respect to a generic lexicographic functional.
    fn is_positive(root: &[i64]) -> bool {
        for &c in root {
            if c != 0 {
                return c > 0;
            }
        }
        false
    }

    fn find_simple(&self) -> Vec<usize> {
        let positives: Vec<usize> = (0..self.roots.len())
            .filter(|&i| Self::is_positive(&self.roots[i]))
            .collect();
        let mut simple: Vec<usize> = positives
            .iter()
            .copied()
            .filter(|&i| {
                // not a sum of two positive roots
                !positives.iter().any(|&j| {
                    positives.iter().any(|&k| {
                        let sum: Vec<i64> = self.roots[j]
                            .iter()
                            .zip(&self.roots[k])
                            .map(|(a, b)| a + b)
                            .collect();
                        sum == self.roots[i]
                    })
                })
            })
            .collect();
        simple.sort_by(|&a, &b| self.roots[a].cmp(&self.roots[b]));
        simple
    }

    pub fn root_index(&self, v: &[i64]) -> Option<usize> {
        self.roots.iter().position(|r| r == v)
    }

    /// Reflection s_alpha acting on a character-lattice vector.
    pub fn reflect(&self, alpha_idx: usize, v: &[i64]) -> Vec<i64> {
        let alpha = &self.roots[alpha_idx];
        let acheck = &self.coroots[alpha_idx];
        let c = pairing_int(v, acheck);
        assert!(c.is_integer(), "reflection leaves the lattice");
        let c = c.to_integer();
        v.iter().zip(alpha).map(|(x, a)| x - c * a).collect()
    }

    /// The simple reflections as permutations of the root list.
    pub fn simple_reflection_perms(&self) -> Vec<Vec<usize>> {
        self.simple
            .iter()
            .map(|&s| {
                (0..self.roots.len())
                    .map(|i| {
                        let img = self.reflect(s, &self.roots[i]);
                        self.root_index(&img)
                            .expect("Weyl group stabilizes the roots")
                    })
                    .collect()
            })
            .collect()
    }

    /// All Weyl group elements as permutations of the root list.
    pub fn weyl_elements(&self) -> Vec<Vec<usize>> {
        let n = self.roots.len();
        let gens = self.simple_reflection_perms();
        let id: Vec<usize> = (0..n).collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(id.clone());
        queue.push_back(id);
        while let Some(w) = queue.pop_front() {
            out.push(w.clone());
            for g in &gens {
                let comp: Vec<usize> = (0..n).map(|i| w[g[i]]).collect();
                if seen.insert(comp.clone()) {
                    queue.push_back(comp);
                }
            }
        }
        out
    }

    pub fn weyl_group_order(&self) -> usize {
        self.weyl_elements().len()
    }

    /// Weyl elements as matrices on the ambient lattice (closure of simple
    /// reflection matrices).
    pub fn weyl_matrices(&self) -> Vec<Mat<Rat>> {
        let d = self.dim;
        let gens: Vec<Mat<Rat>> = self
            .simple
            .iter()
            .map(|&s| {
                let mut m = Mat::identity_like(d, &rat_int(0));
                for j in 0..d {
                    let mut ej = vec![0i64; d];
                    ej[j] = 1;
                    let img = self.reflect(s, &ej);
                    for i in 0..d {
                        m[(i, j)] = rat_int(img[i]);
                    }
                }
                m
            })
            .collect();
        let id = Mat::identity_like(d, &rat_int(0));
        let mut out: Vec<Mat<Rat>> = vec![id.clone()];
        let mut queue = VecDeque::new();
        queue.push_back(id);
        while let Some(w) = queue.pop_front() {
            for g in &gens {
                let next = g.mul(&w);
                if !out.contains(&next) {
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        out
    }
}

/// Parse "A2", "G2", ... into a root system.
pub fn parse_cartan(s: &str) -> Result<RootSystem, RootDataError> {
    let s = s.trim();
    if s.len() < 2 {
        return Err(RootDataError::UnsupportedType(s.into()));
    }
    let cartan = match &s[0..1] {
        "A" | "a" => CartanType::A,
        "B" | "b" => CartanType::B,
        "C" | "c" => CartanType::C,
        "D" | "d" => CartanType::D,
        "G" | "g" => CartanType::G,
        _ => return Err(RootDataError::UnsupportedType(s.into())),
    };
    let rank: usize = s[1..]
        .parse()
        .map_err(|_| RootDataError::UnsupportedType(s.into()))?;
    RootSystem::new(cartan, rank)
}

/// Chevalley pinning for type A realized in gl_n / sl_n: the root e_i - e_j
/// corresponds to the elementary matrix E_{ij}.
#[derive(Clone, Debug)]
pub struct ChevalleyPinning {
    pub n: usize,
    pub root_system: RootSystem,
}

impl ChevalleyPinning {
    pub fn type_a(n: usize) -> ChevalleyPinning {
        assert!(n >= 2);
        let root_system = RootSystem::new(CartanType::A, n - 1).unwrap();
        ChevalleyPinning { n, root_system }
    }

    /// The (i, j) index pair of a root, i.e. the position of the +1 / -1.
    pub fn root_pair(&self, root_idx: usize) -> (usize, usize) {
        let r = &self.root_system.roots[root_idx];
        let i = r.iter().position(|&c| c == 1).unwrap();
        let j = r.iter().position(|&c| c == -1).unwrap();
        (i, j)
    }

    pub fn chevalley_basis_elt(&self, root_idx: usize) -> Mat<Rat> {
        let (i, j) = self.root_pair(root_idx);
        let mut m = Mat::zero_like(self.n, self.n, &rat_int(0));
        m[(i, j)] = rat_int(1);
        m
    }

    /// The root group homomorphism x_alpha(y) = 1 + y E_{ij}.
    pub fn root_group_elt(&self, root_idx: usize, y: Rat) -> Mat<Rat> {
        let mut m = Mat::identity_like(self.n, &rat_int(0));
        let (i, j) = self.root_pair(root_idx);
        m[(i, j)] = y;
        m
    }

    fn negative_of(&self, root_idx: usize) -> usize {
        let neg: Vec<i64> = self.root_system.roots[root_idx]
            .iter()
            .map(|x| -x)
            .collect();
        self.root_system.root_index(&neg).unwrap()
    }

    /// w_beta = x_beta(1) x_{-beta}(eps) x_beta(1) with eps = +-1 chosen so
    /// the product normalizes the diagonal torus.
    pub fn weyl_element(&self, root_idx: usize) -> Mat<Rat> {
        let neg = self.negative_of(root_idx);
        for eps in [1i64, -1] {
            let w = self
                .root_group_elt(root_idx, rat_int(1))
                .mul(&self.root_group_elt(neg, rat_int(eps)))
                .mul(&self.root_group_elt(root_idx, rat_int(1)));
            if self.normalizes_torus(&w) {
                return w;
            }
        }
        unreachable!("one of eps = +-1 normalizes the torus")
    }

    fn normalizes_torus(&self, w: &Mat<Rat>) -> bool {
        // w diag(t) w^{-1} diagonal for generic t: w must be monomial.
        (0..self.n).all(|i| (0..self.n).filter(|&j| !w[(i, j)].is_zero()).count() == 1)
            && (0..self.n).all(|j| (0..self.n).filter(|&i| !w[(i, j)].is_zero()).count() == 1)
    }

    /// Ad(w)(X) = w X w^{-1}.
    pub fn ad(&self, w: &Mat<Rat>, x: &Mat<Rat>) -> Mat<Rat> {
        w.mul(x)
            .mul(&w.inverse().expect("Weyl elements are invertible"))
    }

    /// Checks Ad(w_beta)(X_alpha) = +- X_{s_beta(alpha)} for all alpha, beta.
    pub fn verify_chevalley_property(&self) -> bool {
        let rs = &self.root_system;
        for beta in 0..rs.roots.len() {
            let w = self.weyl_element(beta);
            for alpha in 0..rs.roots.len() {
                let img_vec = {
                    let acheck = &rs.coroots[beta];
                    let c = pairing_int(&rs.roots[alpha], acheck).to_integer();
                    rs.roots[alpha]
                        .iter()
                        .zip(&rs.roots[beta])
                        .map(|(x, b)| x - c * b)
                        .collect::<Vec<i64>>()
                };
                let target_idx = rs.root_index(&img_vec).unwrap();
                let target = self.chevalley_basis_elt(target_idx);
                let image = self.ad(&w, &self.chevalley_basis_elt(alpha));
                if image != target && image != target.neg() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn root_counts() {
        assert_eq!(RootSystem::new(CartanType::A, 1).unwrap().roots.len(), 2);
        assert_eq!(RootSystem::new(CartanType::A, 2).unwrap().roots.len(), 6);
        assert_eq!(RootSystem::new(CartanType::G, 2).unwrap().roots.len(), 12);
        assert_eq!(RootSystem::new(CartanType::B, 3).unwrap().roots.len(), 18);
        assert!(RootSystem::new(CartanType::B, 1).is_err());
    }

    #[test]
    fn weyl_orders_match_table() {
        let cases = [
            (CartanType::A, 1, 2),
            (CartanType::A, 2, 6),
            (CartanType::A, 3, 24),
            (CartanType::B, 2, 8),
            (CartanType::B, 3, 48),
            (CartanType::C, 3, 48),
            (CartanType::D, 3, 24),
            (CartanType::G, 2, 12),
            (CartanType::A, 4, 120),
            (CartanType::B, 4, 384),
            (CartanType::C, 4, 384),
            (CartanType::D, 4, 192),
        ];
        for (t, r, expected) in cases {
            assert_eq!(
                RootSystem::new(t, r).unwrap().weyl_group_order(),
                expected,
                "{t}{r}"
            );
        }
    }

    #[test]
    fn pairing_values() {
        let rs = RootSystem::new(CartanType::A, 1).unwrap();
        let alpha = &rs.roots[rs.simple[0]];
        let acheck = &rs.coroots[rs.simple[0]];
        assert_eq!(pairing(alpha, acheck).unwrap(), rat_int(2));
        let quarter: Vec<Rat> = acheck.iter().map(|c| c * rat(1, 4)).collect();
        assert_eq!(pairing(alpha, &quarter).unwrap(), rat(1, 2));
        assert_eq!(
            pairing(alpha, &[rat_int(0), rat_int(0)]).unwrap(),
            rat_int(0)
        );
        assert!(pairing(alpha, &[rat_int(0)]).is_err());
    }

    #[test]
    fn sl2_weyl_element() {
        let pin = ChevalleyPinning::type_a(2);
        let idx = pin.root_system.root_index(&[1, -1]).unwrap();
        let w = pin.weyl_element(idx);
        let expected = Mat::from_rows(vec![
            vec![rat_int(0), rat_int(1)],
            vec![rat_int(-1), rat_int(0)],
        ]);
        assert_eq!(w, expected);
    }

    #[test]
    fn chevalley_property_sl3() {
        assert!(ChevalleyPinning::type_a(3).verify_chevalley_property());
        assert!(ChevalleyPinning::type_a(2).verify_chevalley_property());
    }

    #[test]
    fn weyl_action_stabilizes_roots() {
        for (t, r) in [(CartanType::A, 2), (CartanType::B, 2), (CartanType::G, 2)] {
            let rs = RootSystem::new(t, r).unwrap();
            for s in 0..rs.simple.len() {
                for root in &rs.roots {
                    let img = rs.reflect(rs.simple[s], root);
                    assert!(rs.root_index(&img).is_some());
                }
            }
        }
    }

    #[test]
    fn weyl_matrices_count() {
        let rs = RootSystem::new(CartanType::A, 2).unwrap();
        assert_eq!(rs.weyl_matrices().len(), 6);
    }
}
