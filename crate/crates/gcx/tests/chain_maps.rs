use gcx::chainmaps::{cone_square_failures, verify_named, ChainWindow, MapName};

const W: ChainWindow = ChainWindow { v_max: 3, e_max: 5 };

#[test]
fn maps_commute_with_differentials() {
    for name in MapName::all().into_iter().filter(|m| !m.is_control()) {
        let r = verify_named(name, 3, W).unwrap();
        assert!(r.pass, "{name:?}: {:?}", r.witnesses);
        assert!(r.nonzero_images > 0, "{name:?} is identically zero on the window");
    }
}

#[test]
fn controls_fail() {
    for name in [MapName::CorruptedB, MapName::SwappedA] {
        assert!(!verify_named(name, 3, W).unwrap().pass, "{name:?}");
    }
}

#[test]
fn cone_differential_squares_to_zero() {
    assert!(cone_square_failures(3, W).unwrap().is_empty());
}

#[test]
fn orientation_sum_on_larger_window() {
    for k in [2, 3] {
        let r = verify_named(MapName::OrientSum, k, ChainWindow { v_max: 4, e_max: 6 }).unwrap();
        assert!(r.pass, "k={k}");
    }
}
