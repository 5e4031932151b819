use std::sync::Arc;

use proptest::prelude::*;

use drinfeld_rat::field::{FfElem, FieldParams, FiniteField};

/// Schoolbook product of digit vectors modulo the defining polynomial.
fn naive_mul(f: &FiniteField, a: &[u64], b: &[u64]) -> Vec<u64> {
    let p = f.p();
    let m = f.modulus();
    let d = m.len() - 1;
    let mut prod = vec![0u64; 2 * d];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for top in (d..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        // the modulus is monic
        for (k, &mk) in m.iter().enumerate() {
            let idx = top - d + k;
            prod[idx] = (prod[idx] + p * p - c * mk % p) % p;
        }
    }
    prod.truncate(d);
    prod
}

fn naive_add(f: &FiniteField, a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| (x + y) % f.p()).collect()
}

fn fields() -> Vec<Arc<FiniteField>> {
    [(2, 1, 3), (2, 2, 2), (3, 1, 2), (3, 2, 1), (5, 1, 2), (7, 1, 1)]
        .into_iter()
        .map(|(p, m, big_m)| FiniteField::new(FieldParams { p, m, big_m }).unwrap())
        .collect()
}

fn elem(f: &FiniteField, seed: u64) -> FfElem {
    let n = f.size();
    let k = seed % n;
    f.elements().nth(k as usize).unwrap()
}

proptest! {
    #[test]
    fn zech_tables_agree_with_polynomial_basis(fi in 0usize..6, s in any::<u64>(), t in any::<u64>()) {
        let f = &fields()[fi];
        let (a, b) = (elem(f, s), elem(f, t));
        let (da, db) = (f.to_digits(a), f.to_digits(b));
        prop_assert_eq!(f.to_digits(f.mul(a, b)), naive_mul(f, &da, &db));
        prop_assert_eq!(f.to_digits(f.add(a, b)), naive_add(f, &da, &db));
        prop_assert_eq!(f.from_digits(&da), a);
    }

    #[test]
    fn frobenius_is_a_field_automorphism(fi in 0usize..6, s in any::<u64>(), t in any::<u64>(), k in 0u32..5) {
        let f = &fields()[fi];
        let (a, b) = (elem(f, s), elem(f, t));
        prop_assert_eq!(f.frob(f.add(a, b), k), f.add(f.frob(a, k), f.frob(b, k)));
        prop_assert_eq!(f.frob(f.mul(a, b), k), f.mul(f.frob(a, k), f.frob(b, k)));
        prop_assert_eq!(f.frob_inv(f.frob(a, k), k), a);
        prop_assert_eq!(f.frob(a, 1), f.pow(a, f.q()));
    }

    #[test]
    fn roots_and_inverses(fi in 0usize..6, s in any::<u64>(), n in 1u64..9) {
        let f = &fields()[fi];
        let a = elem(f, s);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FfElem::ONE);
        }
        for r in f.nth_roots(a, n) {
            prop_assert_eq!(f.pow(r, n), a);
        }
        let brute = f.elements().filter(|&x| f.pow(x, n) == a).count();
        prop_assert_eq!(f.nth_roots(a, n).len(), brute);
    }
}

#[test]
fn base_field_is_fixed_by_frobenius() {
    for f in fields() {
        let base = f.base_field_elements();
        assert_eq!(base.len() as u64, f.q());
        assert!(base.iter().all(|&c| f.in_base_field(c)));
        let count = f.elements().filter(|&c| f.in_base_field(c)).count();
        assert_eq!(count as u64, f.q());
    }
}

#[test]
fn canonical_order_is_total_and_zero_first() {
    for f in fields() {
        let mut keys: Vec<u64> = f.elements().map(|a| f.canonical_key(a)).collect();
        assert_eq!(keys[0], 0);
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len() as u64, f.size());
    }
}

#[test]
fn format_parse_round_trip() {
    let f = FiniteField::with_generator_name(FieldParams { p: 3, m: 1, big_m: 2 }, "i").unwrap();
    for a in f.elements() {
        assert_eq!(f.parse(&f.format(a)).unwrap(), a);
    }
    let i = f.generator();
    assert_eq!(f.mul(i, i), f.from_int(-1));
}

#[test]
fn missing_root_reports_extension() {
    let f = FiniteField::new(FieldParams { p: 3, m: 1, big_m: 1 }).unwrap();
    let minus_one = f.from_int(-1);
    assert!(f.nth_roots(minus_one, 2).is_empty());
    assert_eq!(f.root_extension_hint(minus_one, 2), Some(2));
}
