mod common;

use common::*;
use proptest::prelude::*;
use sketchparts::geometry::{
    count_valid_matches, pixels_inside, rasterize, BoundaryIndex, ContourPolygon, KdTree, Pixel, PixelSet,
};
use sketchparts::model::{Canvas, CountMode, Point2D, Sketch};

fn polygon() -> impl Strategy<Value = Vec<Point2D>> {
    prop::collection::vec((0..=20i32, 0..=20i32), 3..9)
        .prop_map(|v| v.into_iter().map(|(x, y)| pt(x as f64, y as f64)).collect::<Vec<_>>())
        .prop_filter("nonzero area", |p| signed_area2(p) != 0.0)
}

fn raster() -> impl Strategy<Value = PixelSet> {
    prop::collection::btree_set((0..24u32, 0..24u32), 0..120).prop_map(|cells| {
        let mut set = PixelSet::new(Canvas::new(24, 24).unwrap());
        for (c, r) in cells {
            set.insert(Pixel::new(c, r));
        }
        set
    })
}

fn mode() -> impl Strategy<Value = CountMode> {
    prop_oneof![Just(CountMode::UniqueBoundary), Just(CountMode::MatchedPixels)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn containment_matches_ray_casting(poly in polygon(), raster in raster()) {
        let contour = ContourPolygon::new(poly.clone()).unwrap();
        let got: Vec<Pixel> = pixels_inside(&contour, &raster).iter().copied().collect();
        prop_assert_eq!(got, oracle_inside(&poly, &raster));
    }

    #[test]
    fn kd_tree_matches_brute_force(
        pts in prop::collection::vec((0..10i32, 0..10i32), 1..80),
        queries in prop::collection::vec((-3.0..13.0f64, -3.0..13.0f64), 1..30),
    ) {
        let pts: Vec<Point2D> = pts.into_iter().map(|(x, y)| pt(x as f64, y as f64)).collect();
        let tree = KdTree::build(pts.clone());
        for (x, y) in queries {
            let q = pt(x, y);
            let got = tree.nearest(&q).map(|n| (n.index, n.dist_sq));
            prop_assert_eq!(got, brute_nearest(&pts, &q));
        }
    }

    #[test]
    fn count_is_monotone_in_threshold(poly in polygon(), raster in raster(), t in 0.1..6.0f64, dt in 0.0..3.0f64, mode in mode()) {
        let c = ContourPolygon::new(poly).unwrap();
        prop_assert!(count_valid_matches(&raster, &c, t, mode) <= count_valid_matches(&raster, &c, t + dt, mode));
    }

    #[test]
    fn count_is_monotone_in_raster(poly in polygon(), small in raster(), extra in raster(), t in 0.1..6.0f64, mode in mode()) {
        let c = ContourPolygon::new(poly).unwrap();
        let mut big = small.clone();
        for p in extra.iter() {
            big.insert(*p);
        }
        prop_assert!(count_valid_matches(&small, &c, t, mode) <= count_valid_matches(&big, &c, t, mode));
    }

    #[test]
    fn count_is_bounded(poly in polygon(), raster in raster(), t in 0.1..30.0f64) {
        let c = ContourPolygon::new(poly).unwrap();
        let samples = c.densified().len();
        let inside = pixels_inside(&c, &raster).len();
        prop_assert!(count_valid_matches(&raster, &c, t, CountMode::UniqueBoundary) <= samples);
        prop_assert!(count_valid_matches(&raster, &c, t, CountMode::MatchedPixels) <= inside);
    }

    #[test]
    fn count_matches_oracle(poly in polygon(), raster in raster(), t in 0.5..5.0f64, mode in mode()) {
        let c = ContourPolygon::new(poly.clone()).unwrap();
        prop_assert_eq!(BoundaryIndex::new(c).count(&raster, t, mode), oracle_count(&poly, &raster, t, mode));
    }

    #[test]
    fn densified_spacing_is_at_most_one(poly in polygon()) {
        let c = ContourPolygon::new(poly).unwrap();
        let samples = c.densified();
        // every point on every edge lies within half a pixel of some sample
        let n = c.len();
        for i in 0..n {
            let (a, b) = (c.vertices()[i], c.vertices()[(i + 1) % n]);
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                let q = pt(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
                let (_, d2) = brute_nearest(&samples, &q).unwrap();
                prop_assert!(d2.sqrt() <= 0.5 + 1e-9);
            }
        }
    }
}

#[test]
fn concave_l_shape_with_scattered_pixels() {
    let l = vec![pt(0.0, 0.0), pt(12.0, 0.0), pt(12.0, 4.0), pt(4.0, 4.0), pt(4.0, 12.0), pt(0.0, 12.0)];
    let mut rng = rng(20);
    let mut raster = PixelSet::new(Canvas::new(16, 16).unwrap());
    while raster.len() < 20 {
        use rand::Rng;
        raster.insert(Pixel::new(rng.random_range(0..16), rng.random_range(0..16)));
    }
    // force the reflex corner and both edges meeting it
    for (c, r) in [(4, 4), (8, 4), (4, 8), (6, 6)] {
        raster.insert(Pixel::new(c, r));
    }
    let got: Vec<Pixel> = pixels_inside(&ContourPolygon::new(l.clone()).unwrap(), &raster).iter().copied().collect();
    assert_eq!(got, oracle_inside(&l, &raster));
    assert!(got.contains(&Pixel::new(4, 4)) && got.contains(&Pixel::new(8, 4)) && got.contains(&Pixel::new(4, 8)));
    assert!(!got.contains(&Pixel::new(6, 6)));
}

#[test]
fn empty_selection_rasterizes_to_nothing() {
    let sketch = Sketch {
        category: "c".into(),
        sketch_id: "s".into(),
        canvas: Canvas::new(8, 8).unwrap(),
        strokes: vec![stroke(0, 0, vec![pt(0.0, 0.0), pt(4.0, 0.0)], 1)],
    };
    assert!(rasterize(&sketch, Some(&Default::default())).is_empty());
    assert_eq!(rasterize(&sketch, None).len(), 5);
}
