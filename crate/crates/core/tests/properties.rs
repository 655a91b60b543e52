use nsbox_core::boxes::{make_vertex, mix, polytope_vertices, white_noise};
use nsbox_core::inequalities::{mermin_value, svetlichny_value};
use nsbox_core::membership::{classify, verify_witness};
use nsbox_core::strengths::{canonical_decomposition, strength_lp};
use nsbox_core::superlocality::{
    rank_lower_bound, superlocality_verdict, verify_verdict, PairClass, Status, SublocalDecomposition, Term,
};
use nsbox_core::{BipartiteBox, Cut, Scalar, SingleBox, TripartiteBox, VertexLabel};
use proptest::prelude::*;

fn all_labels() -> Vec<VertexLabel> {
    let mut v = polytope_vertices(2);
    v.extend(VertexLabel::mermin_all());
    v
}

fn label() -> impl Strategy<Value = VertexLabel> {
    let labels = all_labels();
    (0..labels.len()).prop_map(move |i| labels[i])
}

fn weight() -> impl Strategy<Value = Scalar> {
    (0i64..=12).prop_map(|k| Scalar::ratio(k, 12))
}

fn single_box() -> impl Strategy<Value = SingleBox> {
    (0i64..=6, 0i64..=6).prop_map(|(p, q)| {
        let (p, q) = (Scalar::ratio(p, 6), Scalar::ratio(q, 6));
        SingleBox::new([p.clone(), Scalar::one() - p, q.clone(), Scalar::one() - q]).unwrap()
    })
}

fn extremal_label() -> impl Strategy<Value = VertexLabel> {
    let labels: Vec<_> = VertexLabel::svetlichny_all().chain(VertexLabel::mermin_all()).collect();
    (0..labels.len()).prop_map(move |i| labels[i])
}

#[test]
fn flipping_epsilon_negates_both_values() {
    let labels: Vec<[u8; 4]> = (0..16u8).map(|v| [v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1]).collect();
    for l in all_labels() {
        let b = make_vertex(&l);
        for x in &labels {
            let mut y = *x;
            y[3] ^= 1;
            assert_eq!(svetlichny_value(&b, *x), -svetlichny_value(&b, y), "{l}");
            assert_eq!(mermin_value(&b, *x), -mermin_value(&b, y), "{l}");
        }
    }
}

#[test]
fn deterministic_vertices_are_sublocal_at_dimension_one() {
    for l in VertexLabel::deterministic_all() {
        let b = make_vertex(&l);
        for cut in Cut::ALL {
            let v = superlocality_verdict(&b, cut, 1);
            assert_eq!(v.status, Status::Sublocal, "{l} {cut}");
            assert!(verify_verdict(&b, &v));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mixing_composes_weights(a in label(), b in label(), c in label(), t in weight(), s in weight()) {
        let (a, b, c) = (make_vertex(&a), make_vertex(&b), make_vertex(&c));
        let one = Scalar::one();
        let inner = mix(&[a.clone(), b.clone()], &[t.clone(), &one - &t]).unwrap();
        let nested = mix(&[inner, c.clone()], &[s.clone(), &one - &s]).unwrap();
        let flat = mix(&[a, b, c], &[&s * &t, &s * (&one - &t), &one - &s]).unwrap();
        prop_assert!(nested.validate().is_valid());
        prop_assert_eq!(nested, flat);
    }

    #[test]
    fn product_boxes_flatten_to_rank_one(single in single_box(), bob in single_box(), charlie in single_box(), cut in 0usize..3) {
        let pair = BipartiteBox::from_fn(|o, x| bob.get(o[0], x[0]) * charlie.get(o[1], x[1]));
        let cut = Cut::ALL[cut];
        let term = Term { weight: Scalar::one(), single, pair };
        let b = SublocalDecomposition { cut, class: PairClass::Local, terms: vec![term] }.reconstruct();
        prop_assert!(b.validate().is_valid());
        for c in Cut::ALL {
            prop_assert_eq!(rank_lower_bound(&b, c), 1);
        }
    }

    #[test]
    fn membership_reports_nest(a in label(), b in label(), t in weight()) {
        let p = mix(&[make_vertex(&a), make_vertex(&b)], &[t.clone(), Scalar::one() - &t]).unwrap();
        let r = classify(&p);
        prop_assert!(r.nonsignaling);
        prop_assert!(!r.in_l || r.in_l2);
        prop_assert!(!r.in_l2 || r.in_r);
        for w in &r.witnesses {
            prop_assert!(verify_witness(&p, w));
        }
        let violates = (0..16u8).any(|v| svetlichny_value(&p, [v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1]) > Scalar::int(4));
        prop_assert!(!violates || !r.in_l2);
    }

    #[test]
    fn noisy_extremal_boxes_decompose_canonically(l in extremal_label(), t in weight()) {
        let p = mix(&[make_vertex(&l), white_noise()], &[t.clone(), Scalar::one() - &t]).unwrap();
        let d = canonical_decomposition(&p).unwrap();
        prop_assert_eq!(d.reconstruct(), p.clone());
        let r = strength_lp(&p).unwrap();
        let strength = if matches!(l, VertexLabel::Svetlichny(_)) { r.svetlichny_strength } else { r.mermin_strength };
        prop_assert_eq!(strength, t);
    }

    #[test]
    fn verdicts_verify(a in 0usize..64, b in 0usize..64, t in weight(), cut in 0usize..3, d in 1usize..=3) {
        let labels = polytope_vertices(0);
        let p: TripartiteBox =
            mix(&[make_vertex(&labels[a]), make_vertex(&labels[b])], &[t.clone(), Scalar::one() - &t]).unwrap();
        let v = superlocality_verdict(&p, Cut::ALL[cut], d);
        prop_assert!(verify_verdict(&p, &v));
        let rank = rank_lower_bound(&p, Cut::ALL[cut]);
        prop_assert_eq!(v.status == Status::Superlocal, rank > d);
    }
}
