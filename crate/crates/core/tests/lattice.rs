use oam_lattice::lattice::Direction;
use oam_lattice::{Boundary, LatticeSpec, SiteIndex};
use proptest::prelude::*;

fn spec(n: usize, lmin: i64, lmax: i64, sd: usize, bx: Boundary, by: Boundary) -> LatticeSpec {
    LatticeSpec::new(n, lmin, lmax, sd, bx, by).unwrap()
}

#[test]
fn flat_index_examples() {
    let s = spec(2, -1, 1, 1, Boundary::Open, Boundary::Open);
    assert_eq!(s.flat_index(&SiteIndex::new(0, -1, 0)).unwrap(), 0);
    assert_eq!(s.flat_index(&SiteIndex::new(1, 1, 0)).unwrap(), 5);
    let s = spec(2, 0, 1, 2, Boundary::Open, Boundary::Open);
    assert_eq!(s.flat_index(&SiteIndex::new(1, 0, 1)).unwrap(), 5);
    assert_eq!(s.dim(), 8);
}

#[test]
fn out_of_range_sites_are_rejected() {
    let s = spec(2, -1, 1, 1, Boundary::Open, Boundary::Open);
    assert!(s.flat_index(&SiteIndex::new(2, 0, 0)).is_err());
    assert!(s.flat_index(&SiteIndex::new(0, 2, 0)).is_err());
    assert!(s.flat_index(&SiteIndex::new(0, 0, 1)).is_err());
    assert!(s.site_of(6).is_err());
}

#[test]
fn invalid_specs() {
    assert!(LatticeSpec::new(0, 0, 1, 1, Boundary::Open, Boundary::Open).is_err());
    assert!(LatticeSpec::new(1, 2, 1, 1, Boundary::Open, Boundary::Open).is_err());
    assert!(LatticeSpec::new(1, 0, 1, 3, Boundary::Open, Boundary::Open).is_err());
}

#[test]
fn neighbor_counts() {
    let s = spec(3, -2, 2, 1, Boundary::Open, Boundary::Open);
    assert_eq!(s.neighbors(&SiteIndex::new(0, -2, 0)).unwrap().len(), 2);
    let s = spec(3, -2, 2, 1, Boundary::Periodic, Boundary::Periodic);
    assert_eq!(s.neighbors(&SiteIndex::new(1, 0, 0)).unwrap().len(), 4);
    let s = spec(3, -2, 2, 1, Boundary::Open, Boundary::Periodic);
    let nb = s.neighbors(&SiteIndex::new(0, 2, 0)).unwrap();
    assert_eq!(nb.len(), 3);
    let up = nb.iter().find(|(d, _)| *d == Direction::PlusY).unwrap();
    assert_eq!(up.1.l, -2);
}

fn arb_spec() -> impl Strategy<Value = LatticeSpec> {
    (1usize..6, -4i64..2, 0i64..5, 1usize..3, any::<bool>(), any::<bool>()).prop_map(|(n, lmin, w, sd, px, py)| {
        let b = |p: bool| if p { Boundary::Periodic } else { Boundary::Open };
        LatticeSpec::new(n, lmin, lmin + w, sd, b(px), b(py)).unwrap()
    })
}

proptest! {
    #[test]
    fn flat_index_is_a_bijection(s in arb_spec()) {
        for idx in 0..s.dim() {
            let site = s.site_of(idx).unwrap();
            prop_assert_eq!(s.flat_index(&site).unwrap(), idx);
        }
    }

    #[test]
    fn neighbor_relation_is_symmetric(s in arb_spec()) {
        for idx in 0..s.dim() {
            let a = s.site_of(idx).unwrap();
            for (_, b) in s.neighbors(&a).unwrap() {
                let back = s.neighbors(&b).unwrap();
                prop_assert!(back.iter().any(|(_, c)| *c == a));
            }
        }
    }
}
