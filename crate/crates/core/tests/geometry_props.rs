//! Property tests for AOI geometry.

use proptest::prelude::*;

use studentsim::model::{aoi_center_distance, map_point_to_aoi, Aoi, BBox, Slide, Transcript};

fn arb_bbox() -> impl Strategy<Value = BBox> {
    (0.0f64..0.9, 0.0f64..0.9, 0.01f64..0.1, 0.01f64..0.1)
        .prop_map(|(x, y, w, h)| BBox::new(x, y, (x + w).min(1.0), (y + h).min(1.0)))
}

fn arb_aoi(id: u32) -> impl Strategy<Value = Aoi> {
    arb_bbox().prop_map(move |bbox| Aoi {
        id,
        bbox,
        label: format!("region {id}"),
    })
}

proptest! {
    #[test]
    fn center_distance_satisfies_metric_axioms(
        a in arb_aoi(1),
        b in arb_aoi(2),
        c in arb_aoi(3),
    ) {
        let ab = aoi_center_distance(&a, &b);
        let ba = aoi_center_distance(&b, &a);
        let ac = aoi_center_distance(&a, &c);
        let bc = aoi_center_distance(&b, &c);
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert_eq!(aoi_center_distance(&a, &a), 0.0);
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn point_mapping_is_deterministic_and_contained(
        aois in prop::collection::vec(arb_bbox(), 1..6),
        x in 0.0f64..=1.0,
        y in 0.0f64..=1.0,
    ) {
        let slide = Slide {
            index: 1,
            aois: aois
                .iter()
                .enumerate()
                .map(|(i, bbox)| Aoi { id: (i + 1) as u32, bbox: *bbox, label: format!("r{i}") })
                .collect(),
            transcripts: vec![Transcript { index: 1, text: "t".into(), pace_aoi: 1, window: None }],
            questions: vec![],
        };
        let first = map_point_to_aoi((x, y), &slide);
        let second = map_point_to_aoi((x, y), &slide);
        prop_assert_eq!(first, second);
        if let Some(id) = first {
            let aoi = slide.aoi(id).unwrap();
            prop_assert!(aoi.bbox.contains((x, y)));
        } else {
            for aoi in &slide.aois {
                prop_assert!(!aoi.bbox.contains((x, y)));
            }
        }
    }
}
