//! Explicit finite groups: permutation groups and 2x2 matrix groups over
//! prime fields, with multiplication tables, conjugacy classes, subgroup
//! closure and coset machinery.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FinRepError {
    #[error("not a subgroup")]
    NotASubgroup,
    #[error("representation is not irreducible")]
    NotIrreducible,
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("group too large: {0} elements (bound {1})")]
    GroupTooLarge(usize, usize),
    #[error("degenerate form")]
    DegenerateForm,
    #[error("intertwiner not found (internal error)")]
    IntertwinerNotFound,
}

pub type Result<T> = std::result::Result<T, FinRepError>;

pub const DEFAULT_ORDER_BOUND: usize = 10_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ElementKind {
    Perm { n: usize },
    Mat2 { q: u64 },
}

impl ElementKind {
    fn identity(&self) -> Vec<u8> {
        match *self {
            ElementKind::Perm { n } => (0..n as u8).collect(),
            ElementKind::Mat2 { .. } => vec![1, 0, 0, 1],
        }
    }

    fn compose(&self, a: &[u8], b: &[u8]) -> Vec<u8> {
        match *self {
            // (a b)(i) = a(b(i))
            ElementKind::Perm { .. } => b.iter().map(|&i| a[i as usize]).collect(),
            ElementKind::Mat2 { q } => {
                let q = q as u64;
                let m = |x: &[u8], i: usize| x[i] as u64;
                vec![
                    ((m(a, 0) * m(b, 0) + m(a, 1) * m(b, 2)) % q) as u8,
                    ((m(a, 0) * m(b, 1) + m(a, 1) * m(b, 3)) % q) as u8,
                    ((m(a, 2) * m(b, 0) + m(a, 3) * m(b, 2)) % q) as u8,
                    ((m(a, 2) * m(b, 1) + m(a, 3) * m(b, 3)) % q) as u8,
                ]
            }
        }
    }

    fn invert(&self, a: &[u8]) -> Vec<u8> {
        match *self {
            ElementKind::Perm { n } => {
                let mut out = vec![0u8; n];
                for (i, &img) in a.iter().enumerate() {
                    out[img as usize] = i as u8;
                }
                out
            }
            ElementKind::Mat2 { q } => {
                let qi = q as i64;
                let det = (a[0] as i64 * a[3] as i64 - a[1] as i64 * a[2] as i64).rem_euclid(qi);
                let dinv = mod_inv(det as u64, q);
                let e = |x: i64| ((x.rem_euclid(qi)) as u64 * dinv % q) as u8;
                vec![
                    e(a[3] as i64),
                    e(-(a[1] as i64)),
                    e(-(a[2] as i64)),
                    e(a[0] as i64),
                ]
            }
        }
    }
}

fn mod_inv(a: u64, q: u64) -> u64 {
    let mut r = 1u64;
    let mut base = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    r
}

/// A finite group with explicit elements and a full multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    pub name: String,
    pub kind: ElementKind,
    pub elems: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, u32>,
    mul_table: Vec<u32>,
    pub inv_table: Vec<u32>,
    pub id: u32,
    pub gens: Vec<u32>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.name, self.order())
    }
}

impl FiniteGroup {
    pub fn from_generators(
        name: &str,
        kind: ElementKind,
        gens: Vec<Vec<u8>>,
        bound: usize,
    ) -> Result<FiniteGroup> {
        let id = kind.identity();
        let mut elems = vec![id.clone()];
        let mut index = HashMap::new();
        index.insert(id, 0u32);
        let mut queue: VecDeque<u32> = VecDeque::new();
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let prod = kind.compose(&elems[i as usize], g);
                if !index.contains_key(&prod) {
                    let idx = elems.len() as u32;
                    if elems.len() >= bound {
                        return Err(FinRepError::GroupTooLarge(elems.len() + 1, bound));
                    }
                    index.insert(prod.clone(), idx);
                    elems.push(prod);
                    queue.push_back(idx);
                }
            }
        }
        let n = elems.len();
        let mut mul_table = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = kind.compose(&elems[i], &elems[j]);
                mul_table[i * n + j] = index[&prod];
            }
        }
        let inv_table = (0..n).map(|i| index[&kind.invert(&elems[i])]).collect();
        let gen_ids = gens.iter().map(|g| index[g]).collect();
        Ok(FiniteGroup {
            name: name.to_string(),
            kind,
            elems,
            index,
            mul_table,
            inv_table,
            id: 0,
            gens: gen_ids,
        })
    }

    pub fn symmetric(n: usize) -> FiniteGroup {
        assert!(n >= 2);
        let mut cycle: Vec<u8> = (0..n as u8).collect();
        cycle.rotate_left(1);
        let mut swap: Vec<u8> = (0..n as u8).collect();
        swap.swap(0, 1);
        FiniteGroup::from_generators(
            &format!("S{n}"),
            ElementKind::Perm { n },
            vec![swap, cycle],
            DEFAULT_ORDER_BOUND,
        )
        .expect("S_n fits")
    }

    pub fn sl2(q: u64) -> Result<FiniteGroup> {
        if ![2, 3, 5, 7, 11, 13].contains(&q) {
            return Err(FinRepError::UnsupportedGroup(format!("SL2(F_{q})")));
        }
        FiniteGroup::from_generators(
            &format!("SL2(F{q})"),
            ElementKind::Mat2 { q },
            vec![vec![1, 1, 0, 1], vec![1, 0, 1, 1]],
            DEFAULT_ORDER_BOUND,
        )
    }

    pub fn gl2(q: u64) -> Result<FiniteGroup> {
        if ![2, 3, 5, 7].contains(&q) {
            return Err(FinRepError::UnsupportedGroup(format!("GL2(F_{q})")));
        }
        let g = crate::fq::Fq::generator(q, 1, 0).a as u8;
        FiniteGroup::from_generators(
            &format!("GL2(F{q})"),
            ElementKind::Mat2 { q },
            vec![vec![1, 1, 0, 1], vec![1, 0, 1, 1], vec![g, 0, 0, 1]],
            DEFAULT_ORDER_BOUND,
        )
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul_table[a as usize * self.order() + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv_table[a as usize]
    }

    pub fn conj(&self, g: u32, by: u32) -> u32 {
        self.mul(self.mul(by, g), self.inv(by))
    }

    pub fn index_of(&self, key: &[u8]) -> Option<u32> {
        self.index.get(key).copied()
    }

    pub fn element_order(&self, g: u32) -> u64 {
        let mut k = 1u64;
        let mut x = g;
        while x != self.id {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        let mut e = 1u64;
        for g in 0..self.order() as u32 {
            e = num_integer::lcm(e, self.element_order(g));
        }
        e
    }

    pub fn power(&self, g: u32, k: u64) -> u32 {
        let mut acc = self.id;
        for _ in 0..k {
            acc = self.mul(acc, g);
        }
        acc
    }

    pub fn conjugacy_classes(&self) -> (Vec<Vec<u32>>, Vec<usize>) {
        let n = self.order();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n as u32 {
            if class_of[g as usize] != usize::MAX {
                continue;
            }
            let idx = classes.len();
            let mut class = Vec::new();
            let mut seen = HashSet::new();
            for h in 0..n as u32 {
                let c = self.conj(g, h);
                if seen.insert(c) {
                    class.push(c);
                    class_of[c as usize] = idx;
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        (classes, class_of)
    }

    /// Closure of a set of elements as a sorted index list.
    pub fn subgroup_closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut set: BTreeSet<u32> = BTreeSet::new();
        set.insert(self.id);
        let mut queue: VecDeque<u32> = vec![self.id].into();
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if set.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// All subgroups generated by at most two elements (exhaustive for S4 and
    /// SL2(F3), whose subgroups are all 2-generated).
    pub fn two_generated_subgroups(&self) -> Vec<Vec<u32>> {
        let mut out: BTreeSet<Vec<u32>> = BTreeSet::new();
        out.insert(vec![self.id]);
        let n = self.order() as u32;
        for g in 0..n {
            out.insert(self.subgroup_closure(&[g]));
            for h in g..n {
                out.insert(self.subgroup_closure(&[g, h]));
            }
        }
        out.into_iter().collect()
    }

    pub fn is_subgroup(&self, h: &[u32]) -> bool {
        let set: HashSet<u32> = h.iter().copied().collect();
        set.contains(&self.id)
            && h.iter().all(|&a| {
                set.contains(&self.inv(a)) && h.iter().all(|&b| set.contains(&self.mul(a, b)))
            })
    }

    /// Left coset representatives of H in G (g H).
    pub fn left_coset_reps(&self, h: &[u32]) -> Vec<u32> {
        let hset: HashSet<u32> = h.iter().copied().collect();
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        for g in 0..self.order() as u32 {
            if seen[g as usize] {
                continue;
            }
            reps.push(g);
            for &x in &hset {
                seen[self.mul(g, x) as usize] = true;
            }
        }
        reps
    }

    /// Double coset representatives of K' \ G / K.
    pub fn double_coset_reps(&self, kp: &[u32], k: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        for g in 0..self.order() as u32 {
            if seen[g as usize] {
                continue;
            }
            reps.push(g);
            for &a in kp {
                let ag = self.mul(a, g);
                for &b in k {
                    seen[self.mul(ag, b) as usize] = true;
                }
            }
        }
        reps
    }

    /// Intersection of two subgroups given as sorted index lists.
    pub fn intersect(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let bs: HashSet<u32> = b.iter().copied().collect();
        a.iter().copied().filter(|x| bs.contains(x)).collect()
    }

    /// Conjugate subgroup g H g^{-1}.
    pub fn conj_subgroup(&self, h: &[u32], g: u32) -> Vec<u32> {
        let mut out: Vec<u32> = h.iter().map(|&x| self.conj(x, g)).collect();
        out.sort_unstable();
        out
    }

    pub fn all_elements(&self) -> Vec<u32> {
        (0..self.order() as u32).collect()
    }
}
