//! Character tables by the Burnside-Dixon class-sum eigenvalue method.
//!
//! All arithmetic happens in F_l for a prime l = 1 mod exponent(G) with
//! l > 2 sqrt(|G|); the complex character values are recovered exactly as
//! sums of roots of unity from eigenvalue multiplicities, so the resulting
//! table is exact cyclotomic data with no numerical step anywhere.

use super::group::FiniteGroup;
use crate::cyclotomic::Cyc;

#[derive(Clone, Debug)]
pub struct ClassData {
    pub classes: Vec<Vec<u32>>,
    pub class_of: Vec<usize>,
    pub reps: Vec<u32>,
    pub sizes: Vec<usize>,
}

impl ClassData {
    pub fn new(group: &FiniteGroup) -> ClassData {
        let (classes, class_of) = group.conjugacy_classes();
        let reps = classes.iter().map(|c| c[0]).collect();
        let sizes = classes.iter().map(|c| c.len()).collect();
        ClassData {
            classes,
            class_of,
            reps,
            sizes,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub class_data: ClassData,
    /// chars[i][j] = value of the i-th irreducible on the j-th class.
    pub chars: Vec<Vec<Cyc>>,
    pub degrees: Vec<u64>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

struct Fl {
    l: u64,
}

impl Fl {
    fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.l
    }
    fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.l - b % self.l) % self.l
    }
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.l
    }
    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        a %= self.l;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }
    fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.l - 2)
    }
    fn primitive_root(&self) -> u64 {
        let phi = self.l - 1;
        let mut factors = vec![];
        let mut m = phi;
        let mut p = 2;
        while p * p <= m {
            if m % p == 0 {
                factors.push(p);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        if m > 1 {
            factors.push(m);
        }
        'outer: for g in 2..self.l {
            for &f in &factors {
                if self.pow(g, phi / f) == 1 {
                    continue 'outer;
                }
            }
            return g;
        }
        unreachable!()
    }

    /// Nullspace basis of a k x k matrix over F_l (row-major).
    fn nullspace(&self, mat: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let k = mat.len();
        let mut a: Vec<Vec<u64>> = mat.to_vec();
        let mut pivot_cols = Vec::new();
        let mut row = 0;
        for col in 0..k {
            if let Some(r) = (row..k).find(|&r| a[r][col] != 0) {
                a.swap(row, r);
                let pinv = self.inv(a[row][col]);
                for c in 0..k {
                    a[row][c] = self.mul(a[row][c], pinv);
                }
                for r2 in 0..k {
                    if r2 != row && a[r2][col] != 0 {
                        let f = a[r2][col];
                        for c in 0..k {
                            let t = self.mul(f, a[row][c]);
                            a[r2][c] = self.sub(a[r2][c], t);
                        }
                    }
                }
                pivot_cols.push(col);
                row += 1;
            }
        }
        let mut basis = Vec::new();
        for col in 0..k {
            if pivot_cols.contains(&col) {
                continue;
            }
            let mut v = vec![0u64; k];
            v[col] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = self.sub(0, a[r][col]);
            }
            basis.push(v);
        }
        basis
    }
}

/// Coordinates of each image vector in terms of the given basis (all length
/// k), by Gaussian elimination over F_l.
fn in_basis(fl: &Fl, basis: &[Vec<u64>], images: &[Vec<u64>], k: usize) -> Vec<Vec<u64>> {
    let d = basis.len();
    // augmented system: columns are basis vectors, then all image vectors
    let cols = d + images.len();
    let mut m = vec![vec![0u64; cols]; k];
    for (j, b) in basis.iter().enumerate() {
        for r in 0..k {
            m[r][j] = b[r] % fl.l;
        }
    }
    for (j, v) in images.iter().enumerate() {
        for r in 0..k {
            m[r][d + j] = v[r] % fl.l;
        }
    }
    // eliminate on the first d columns
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..d {
        if let Some(r) = (row..k).find(|&r| m[r][col] != 0) {
            m.swap(row, r);
            let pinv = fl.inv(m[row][col]);
            for c in 0..cols {
                m[row][c] = fl.mul(m[row][c], pinv);
            }
            for r2 in 0..k {
                if r2 != row && m[r2][col] != 0 {
                    let f = m[r2][col];
                    for c in 0..cols {
                        let t = fl.mul(f, m[row][c]);
                        m[r2][c] = fl.sub(m[r2][c], t);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
    }
    assert_eq!(pivots.len(), d, "basis vectors must be independent");
    images
        .iter()
        .enumerate()
        .map(|(j, _)| (0..d).map(|r| m[r][d + j]).collect())
        .collect()
}

/// Compute the exact character table of a finite group.
pub fn character_table(group: &FiniteGroup) -> CharacterTable {
    let class_data = ClassData::new(group);
    let k = class_data.classes.len();
    let n = group.order() as u64;
    let exponent = group.exponent();

    // class multiplication constants a[i][j][m]: C_i C_j = sum a C_m
    let mut a = vec![vec![vec![0u64; k]; k]; k];
    for i in 0..k {
        for (m, &zm) in class_data.reps.iter().enumerate() {
            for &x in &class_data.classes[i] {
                let y = group.mul(group.inv(x), zm);
                let j = class_data.class_of[y as usize];
                a[i][j][m] += 1;
            }
        }
    }

    // prime l = 1 mod exponent with l > 2 sqrt(n)
    let bound = (2.0 * (n as f64).sqrt()).ceil() as u64;
    let mut l = exponent + 1;
    while !(is_prime(l) && l > bound) {
        l += exponent;
    }
    let fl = Fl { l };

    // class matrices M_i with (M_i)[j][m] = a[i][j][m], so M_i w = omega_i w
    // for the central character vector w = (omega(C_m))_m.
    let mats: Vec<Vec<Vec<u64>>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| (0..k).map(|m| a[i][j][m] % l).collect())
                .collect()
        })
        .collect();

    // split the class algebra into common eigenvectors
    let mut subspaces: Vec<Vec<Vec<u64>>> = vec![(0..k)
        .map(|i| {
            let mut v = vec![0u64; k];
            v[i] = 1;
            v
        })
        .collect()];
    for mi in &mats {
        let mut next = Vec::new();
        for space in &subspaces {
            if space.len() == 1 {
                next.push(space.clone());
                continue;
            }
            // restrict M_i to the subspace: find eigenvalues by scanning F_l
            let d = space.len();
            // images of basis vectors under M_i, expressed in subspace coords
            // via the observation that the class algebra is commutative: the
            // subspace is M_i-invariant, so solve coordinates by elimination.
            let img: Vec<Vec<u64>> = space
                .iter()
                .map(|v| {
                    (0..k)
                        .map(|r| {
                            let mut sum = 0u64;
                            for c in 0..k {
                                sum = fl.add(sum, fl.mul(mi[r][c], v[c]));
                            }
                            sum
                        })
                        .collect()
                })
                .collect();
            // coordinates of img in terms of the space basis
            let coords = in_basis(&fl, space, &img, k);
            let mut found = Vec::new();
            for lambda in 0..l {
                let mut shifted: Vec<Vec<u64>> = coords.clone();
                for (idx, row) in shifted.iter_mut().enumerate() {
                    row[idx] = fl.sub(row[idx], lambda);
                }
                // transpose: we need nullspace of (A - lambda I) acting on
                // coordinate columns
                let mut tm = vec![vec![0u64; d]; d];
                for r in 0..d {
                    for c in 0..d {
                        tm[r][c] = shifted[c][r];
                    }
                }
                let ns = fl.nullspace(&tm);
                if !ns.is_empty() {
                    let vecs: Vec<Vec<u64>> = ns
                        .iter()
                        .map(|coef| {
                            let mut v = vec![0u64; k];
                            for (ci, &co) in coef.iter().enumerate() {
                                for t in 0..k {
                                    v[t] = fl.add(v[t], fl.mul(co, space[ci][t]));
                                }
                            }
                            v
                        })
                        .collect();
                    found.push(vecs);
                }
            }
            for f in found {
                next.push(f);
            }
        }
        subspaces = next;
        if subspaces.iter().all(|s| s.len() == 1) {
            break;
        }
    }
    assert!(
        subspaces.iter().all(|s| s.len() == 1) && subspaces.len() == k,
        "class algebra did not split into {k} lines"
    );

    // normalize eigenvectors into central characters: w[0] = 1 (identity class)
    let id_class = class_data.class_of[group.id as usize];
    let mut omegas: Vec<Vec<u64>> = Vec::new();
    for s in &subspaces {
        let v = &s[0];
        assert!(
            v[id_class] != 0,
            "central character vanishes on the identity"
        );
        let c = fl.inv(v[id_class]);
        omegas.push(v.iter().map(|&x| fl.mul(x, c)).collect());
    }

    // degrees: chi(1)^2 = n / sum_j w_j w_{j*} / |C_j|
    let inv_class: Vec<usize> = class_data
        .reps
        .iter()
        .map(|&r| class_data.class_of[group.inv(r) as usize])
        .collect();
    let mut degrees = Vec::new();
    for w in &omegas {
        let mut s = 0u64;
        for j in 0..k {
            let t = fl.mul(w[j], w[inv_class[j]]);
            s = fl.add(s, fl.mul(t, fl.inv(class_data.sizes[j] as u64)));
        }
        let d2 = fl.mul(n % l, fl.inv(s));
        // square root in F_l: the true degree is the lift below l/2
        let mut deg = 0;
        for r in 1..l {
            if fl.mul(r, r) == d2 {
                deg = r.min(l - r);
                break;
            }
        }
        assert!(deg > 0 && deg * deg <= n, "no valid degree lift");
        degrees.push(deg);
    }

    // character values mod l, then exact lift through eigenvalue multiplicities
    let z = fl.primitive_root();
    let mut chars = Vec::new();
    for (wi, w) in omegas.iter().enumerate() {
        let deg = degrees[wi];
        let chi_mod: Vec<u64> = (0..k)
            .map(|j| fl.mul(fl.mul(deg % l, w[j]), fl.inv(class_data.sizes[j] as u64)))
            .collect();
        let mut row = Vec::new();
        for j in 0..k {
            let g = class_data.reps[j];
            let m = group.element_order(g);
            let lam = fl.pow(z, (l - 1) / m);
            let lam_inv = fl.inv(lam);
            let minv = fl.inv(m % l);
            let mut value = Cyc::zero();
            for t in 0..m {
                // multiplicity of zeta_m^t among the eigenvalues of rho(g)
                let mut mu = 0u64;
                for s in 0..m {
                    let cls = class_data.class_of[group.power(g, s) as usize];
                    mu = fl.add(mu, fl.mul(chi_mod[cls], fl.pow(lam_inv, (s * t) % (l - 1))));
                }
                mu = fl.mul(mu, minv);
                assert!(mu <= deg, "eigenvalue multiplicity exceeds the degree");
                if mu > 0 {
                    value += Cyc::from_int(mu as i64) * Cyc::zeta(m, t as i64);
                }
            }
            row.push(value);
        }
        chars.push(row);
    }

    // sanity: degree consistency and first orthogonality
    let total: u64 = degrees.iter().map(|d| d * d).sum();
    assert_eq!(total, n, "sum of squared degrees must be |G|");
    let table = CharacterTable {
        class_data,
        chars,
        degrees,
    };
    debug_assert!(table.verify_orthogonality(group));
    table
}

impl CharacterTable {
    pub fn num_irreducibles(&self) -> usize {
        self.chars.len()
    }

    /// Value of irreducible i on the class of element g.
    pub fn value(&self, i: usize, g: u32) -> &Cyc {
        &self.chars[i][self.class_data.class_of[g as usize]]
    }

    /// Per-element value vector of irreducible i.
    pub fn element_values(&self, group: &FiniteGroup, i: usize) -> Vec<Cyc> {
        (0..group.order())
            .map(|g| self.chars[i][self.class_data.class_of[g]].clone())
            .collect()
    }

    pub fn verify_orthogonality(&self, group: &FiniteGroup) -> bool {
        let n = group.order() as i64;
        let k = self.chars.len();
        for i in 0..k {
            for j in 0..k {
                let mut s = Cyc::zero();
                for (c, class) in self.class_data.classes.iter().enumerate() {
                    let term = self.chars[i][c].clone()
                        * self.chars[j][c].conj()
                        * Cyc::from_int(class.len() as i64);
                    s += term;
                }
                let expected = if i == j {
                    Cyc::from_int(n)
                } else {
                    Cyc::zero()
                };
                if s != expected {
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

    #[test]
    fn s3_table() {
        let g = FiniteGroup::symmetric(3);
        let t = character_table(&g);
        let mut degs = t.degrees.clone();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 2]);
        assert!(t.verify_orthogonality(&g));
    }

    #[test]
    fn s4_table() {
        let g = FiniteGroup::symmetric(4);
        let t = character_table(&g);
        let mut degs = t.degrees.clone();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 2, 3, 3]);
        assert!(t.verify_orthogonality(&g));
    }

    #[test]
    fn sl2_f3_table() {
        let g = FiniteGroup::sl2(3).unwrap();
        let t = character_table(&g);
        let mut degs = t.degrees.clone();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 1, 1, 2, 2, 2, 3]);
        assert!(t.verify_orthogonality(&g));
    }

    #[test]
    fn sl2_f5_table() {
        let g = FiniteGroup::sl2(5).unwrap();
        let t = character_table(&g);
        let mut degs = t.degrees.clone();
        degs.sort_unstable();
        assert_eq!(degs, vec![1, 2, 2, 3, 3, 4, 4, 5, 6]);
        assert!(t.verify_orthogonality(&g));
    }
}
