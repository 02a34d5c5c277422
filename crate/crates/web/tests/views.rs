use wudlab_web::{character_panel, density_series, mixing_series};

#[test]
fn density_series_for_phi() {
    let s = density_series("phi", 45).unwrap();
    assert_eq!(s.points.len(), 22);
    let q5 = s.points.iter().find(|p| p.q == 5).unwrap();
    assert_eq!(q5.alpha, "3/4");
    assert_eq!(s.points[0].alpha, "1/2");
    assert!(s.zeros.is_empty());
    assert_eq!(density_series("[-1,0,1]", 9).unwrap().zeros, vec![3, 9]);
    assert!(density_series("phi", 1_000_000).is_err());
    assert!(density_series("[1,0,0]", 10).is_err());
}

#[test]
fn character_panel_respects_bounds() {
    let p = character_panel("[1,0,1]", 13, 2).unwrap();
    assert_eq!(p.modulus, 169);
    assert_eq!(p.points.len(), 155);
    assert_eq!(p.violations, 0);
    assert!(p.admissible);
}

#[test]
fn mixing_deviation_shrinks_with_j() {
    let s = mixing_series("phi", 7, 6).unwrap();
    assert_eq!(s.points.len(), 6);
    assert!(s.points.windows(2).all(|w| w[1].max_deviation <= w[0].max_deviation));
    assert!(mixing_series("[-1,0,1]", 3, 4).unwrap().vacuous);
}
