//! Finite-group representation toolkit: compact induction, Mackey
//! decomposition and the intertwining criterion at finite scale, cuspidality
//! of SL2/GL2 representations, and exact character tables. These are the
//! exhaustively verifiable oracles the rest of the crate leans on.

mod chartab;
mod group;
mod rep;

pub use chartab::{character_table, CharacterTable, ClassData};
pub use group::{ElementKind, FinRepError, FiniteGroup, DEFAULT_ORDER_BOUND};
pub use rep::{
    induce, induced_character_within, inner_product, intertwining_criterion,
    irreducible_constituent, is_cuspidal, mackey_check, MatrixRep,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::Cyc;

    #[test]
    fn induce_trivial_from_a3() {
        let s3 = FiniteGroup::symmetric(3);
        let a3 = s3.subgroup_closure(&[s3.index_of(&[1, 2, 0]).unwrap()]);
        let rho = MatrixRep::trivial(a3.clone());
        let ind = induce(&s3, &rho).unwrap();
        assert_eq!(ind.degree, 2);
        assert!(ind.verify(&s3));
        // character (2, 0, 2) on classes (e, transpositions, 3-cycles)
        assert_eq!(ind.character_value(s3.id), Cyc::from_int(2));
        let transposition = s3.index_of(&[1, 0, 2]).unwrap();
        assert_eq!(ind.character_value(transposition), Cyc::zero());
        let threecycle = s3.index_of(&[1, 2, 0]).unwrap();
        assert_eq!(ind.character_value(threecycle), Cyc::from_int(2));
        // induction from the whole group is the identity
        let whole = MatrixRep::trivial(s3.all_elements());
        let same = induce(&s3, &whole).unwrap();
        assert_eq!(same.degree, 1);
    }

    #[test]
    fn degree_multiplies_by_index() {
        let s4 = FiniteGroup::symmetric(4);
        let h = s4.subgroup_closure(&[s4.index_of(&[1, 0, 2, 3]).unwrap()]);
        let rho = MatrixRep::trivial(h.clone());
        let ind = induce(&s4, &rho).unwrap();
        assert_eq!(ind.degree, 24 / h.len());
    }

    fn a3_nontrivial_character(s3: &FiniteGroup) -> impl Fn(u32) -> Cyc {
        let c = s3.index_of(&[1, 2, 0]).unwrap();
        let mut val = std::collections::HashMap::new();
        let mut x = s3.id;
        for k in 0..3 {
            val.insert(x, Cyc::zeta(3, k));
            x = s3.mul(x, c);
        }
        move |g: u32| val[&g].clone()
    }

    #[test]
    fn mackey_on_s3() {
        let s3 = FiniteGroup::symmetric(3);
        let a3 = s3.subgroup_closure(&[s3.index_of(&[1, 2, 0]).unwrap()]);
        let chi = a3_nontrivial_character(&s3);
        assert!(mackey_check(&s3, &a3, &a3, &chi));
        // K = G: single double coset, trivially equal
        let all = s3.all_elements();
        let triv = |_: u32| Cyc::one();
        assert!(mackey_check(&s3, &all, &a3, &triv));
    }

    #[test]
    fn intertwining_s3() {
        let s3 = FiniteGroup::symmetric(3);
        let a3 = s3.subgroup_closure(&[s3.index_of(&[1, 2, 0]).unwrap()]);
        let chi = a3_nontrivial_character(&s3);
        assert!(intertwining_criterion(&s3, &a3, &chi).unwrap());
        let triv = |_: u32| Cyc::one();
        assert!(!intertwining_criterion(&s3, &a3, &triv).unwrap());
        // vacuous for K = G
        let all = s3.all_elements();
        assert!(intertwining_criterion(&s3, &all, &triv).unwrap());
    }

    #[test]
    fn frobenius_reciprocity() {
        let s4 = FiniteGroup::symmetric(4);
        let table = character_table(&s4);
        let subs = s4.two_generated_subgroups();
        let all = s4.all_elements();
        for h in subs.iter().filter(|h| h.len() > 1 && h.len() < 24).take(6) {
            let triv = MatrixRep::trivial(h.clone());
            let chi_h: Vec<Cyc> = h.iter().map(|&g| triv.character_value(g)).collect();
            let chi_fun = |g: u32| {
                let pos = h.binary_search(&g).unwrap();
                chi_h[pos].clone()
            };
            let ind = induced_character_within(&s4, &all, h, &chi_fun);
            for i in 0..table.num_irreducibles() {
                let sigma = table.element_values(&s4, i);
                let lhs = inner_product(&ind, &sigma);
                let res: Vec<Cyc> = h.iter().map(|&g| sigma[g as usize].clone()).collect();
                let rhs = inner_product(&chi_h, &res);
                assert_eq!(lhs, rhs, "Frobenius reciprocity failed");
            }
        }
    }
    #[test]
    fn cuspidality_sl2_f3() {
        let g = FiniteGroup::sl2(3).unwrap();
        let table = character_table(&g);
        // trivial representation: V^N = V, never cuspidal
        let triv = MatrixRep::trivial(g.all_elements());
        assert!(!is_cuspidal(&g, &triv).unwrap());
        // Steinberg: the degree-3 constituent of Ind_B^G 1
        let u = g.index_of(&[1, 1, 0, 1]).unwrap();
        let minus = g.index_of(&[2, 0, 0, 2]).unwrap();
        let b = g.subgroup_closure(&[u, minus]);
        assert_eq!(b.len(), 6);
        let ind = induce(&g, &MatrixRep::trivial(b)).unwrap();
        assert_eq!(ind.degree, 4);
        let st_idx = table.degrees.iter().position(|&d| d == 3).unwrap();
        let st = irreducible_constituent(&g, &ind, &table.element_values(&g, st_idx), 3).unwrap();
        assert_eq!(st.degree, 3);
        assert!(st.verify(&g));
        assert!(!is_cuspidal(&g, &st).unwrap());
        // the degree-(q-1) representation with chi(u) = -1: multiplicity one
        // inside Ind_N^G psi for a nontrivial character psi of N
        let n_sub = g.subgroup_closure(&[u]);
        assert_eq!(n_sub.len(), 3);
        let psi_vals: Vec<Cyc> = n_sub
            .iter()
            .map(|&h| {
                // h = u^k: read k off by iterating
                let mut x = g.id;
                let mut k = 0;
                while x != h {
                    x = g.mul(x, u);
                    k += 1;
                }
                Cyc::zeta(3, k)
            })
            .collect();
        let psi = MatrixRep::linear(n_sub.clone(), psi_vals);
        let ind8 = induce(&g, &psi).unwrap();
        assert_eq!(ind8.degree, 8);
        let cusp_idx = (0..table.num_irreducibles())
            .find(|&i| table.degrees[i] == 2 && *table.value(i, u) == Cyc::from_int(-1))
            .expect("SL2(F_3) has a rational cuspidal of degree q-1");
        let cusp =
            irreducible_constituent(&g, &ind8, &table.element_values(&g, cusp_idx), 2).unwrap();
        assert_eq!(cusp.degree, 2);
        assert!(cusp.verify(&g));
        assert!(is_cuspidal(&g, &cusp).unwrap());
        // the two non-rational degree-2 characters are principal-series halves
        // with a one-dimensional N-fixed space, hence not cuspidal
        for i in 0..table.num_irreducibles() {
            if table.degrees[i] == 2 && i != cusp_idx {
                let chi: Vec<Cyc> = n_sub.iter().map(|&h| table.value(i, h).clone()).collect();
                let ones = vec![Cyc::one(); n_sub.len()];
                let dim = inner_product(&chi, &ones);
                assert_eq!(dim, num_rational::BigRational::from_integer(1.into()));
            }
        }
    }

    #[test]
    fn cuspidal_count_sl2_f5() {
        let g = FiniteGroup::sl2(5).unwrap();
        let table = character_table(&g);
        let u = g.index_of(&[1, 1, 0, 1]).unwrap();
        let n_sub = g.subgroup_closure(&[u]);
        let ones = vec![Cyc::one(); n_sub.len()];
        let mut cuspidal = Vec::new();
        for i in 0..table.num_irreducibles() {
            let chi: Vec<Cyc> = n_sub.iter().map(|&h| table.value(i, h).clone()).collect();
            if inner_product(&chi, &ones) == num_rational::BigRational::from_integer(0.into()) {
                cuspidal.push(table.degrees[i]);
            }
        }
        cuspidal.sort_unstable();
        assert_eq!(cuspidal, vec![2, 2, 4, 4]);
    }
    #[test]
    fn cuspidal_count_gl2_f3() {
        let g = FiniteGroup::gl2(3).unwrap();
        let table = character_table(&g);
        let u = g.index_of(&[1, 1, 0, 1]).unwrap();
        let n_sub = g.subgroup_closure(&[u]);
        let ones = vec![Cyc::one(); n_sub.len()];
        let mut cuspidal = Vec::new();
        for i in 0..table.num_irreducibles() {
            let chi: Vec<Cyc> = n_sub.iter().map(|&h| table.value(i, h).clone()).collect();
            if inner_product(&chi, &ones) == num_rational::BigRational::from_integer(0.into()) {
                cuspidal.push(table.degrees[i]);
            }
        }
        cuspidal.sort_unstable();
        // GL2(F_q) has (q^2 - q)/2 cuspidals, all of degree q - 1
        assert_eq!(cuspidal, vec![2, 2, 2]);
    }

}
