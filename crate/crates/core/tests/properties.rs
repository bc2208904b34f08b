//! Property tests across modules.

use motif::c_model::{parse_declarations, render_declarations, ParseConfig};
use motif::campaign::fisher_exact;
use motif::fuzz::bucketize;
use motif::mutagen::{enumerate_sites, generate_mutants, Operator, SiteOptions};
use proptest::prelude::*;

const SCALARS: &[&str] = &[
    "char", "signed char", "unsigned char", "short", "unsigned short", "int", "unsigned int", "long",
    "unsigned long", "long long", "float", "double", "_Bool",
];

fn field() -> impl Strategy<Value = String> {
    (prop::sample::select(SCALARS), 0..3u8, 1..5u64).prop_map(|(ty, shape, n)| match shape {
        0 => format!("{ty} {{}};"),
        1 => format!("{ty} {{}}[{n}];"),
        _ => format!("{ty} *{{}};"),
    })
}

fn declarations() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::collection::vec(field(), 1..5), 1..4).prop_map(|structs| {
        let mut out = String::new();
        for (i, fields) in structs.iter().enumerate() {
            out.push_str(&format!("typedef struct S{i} {{ "));
            for (j, f) in fields.iter().enumerate() {
                out.push_str(&f.replace("{}", &format!("f{j}")));
                out.push(' ');
            }
            out.push_str(&format!("}} T{i};\n"));
        }
        out.push_str("int g(T0 *p, int n);\n");
        out
    })
}

fn expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("a".to_string()), Just("b".to_string()), (0..20u32).prop_map(|n| n.to_string())];
    leaf.prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), prop::sample::select(&["+", "-", "*", "<", "==", "&", "|", "&&"][..]), inner)
            .prop_map(|(l, op, r)| format!("({l} {op} {r})"))
    })
}

proptest! {
    #[test]
    fn parse_render_round_trip(src in declarations()) {
        let env = parse_declarations(&src, &ParseConfig::default()).unwrap().env;
        let rendered = render_declarations(&env, true);
        let again = parse_declarations(&rendered, &ParseConfig::default()).unwrap();
        prop_assert!(again.diagnostics.is_empty(), "{:?}", again.diagnostics);
        prop_assert_eq!(&env.typedefs, &again.env.typedefs);
        prop_assert_eq!(&env.tags, &again.env.tags);
        prop_assert_eq!(&env.signatures, &again.env.signatures);
    }

    #[test]
    fn bucketize_is_monotone(a in any::<u8>(), b in any::<u8>()) {
        let (lo, hi) = (a.min(b) as u32, a.max(b) as u32);
        prop_assert!(bucketize(lo).bit() <= bucketize(hi).bit());
    }

    #[test]
    fn fisher_symmetries(a in 0..30u64, b in 0..30u64, c in 0..30u64, d in 0..30u64) {
        let p = fisher_exact(a, b, c, d);
        prop_assert!((0.0..=1.0).contains(&p));
        for q in [fisher_exact(c, d, a, b), fisher_exact(b, a, d, c), fisher_exact(a, c, b, d)] {
            prop_assert!((p - q).abs() < 1e-9, "{} vs {}", p, q);
        }
    }

    #[test]
    fn every_mutant_is_a_single_edit(e in expr()) {
        let src = format!("int f(int a, int b)\n{{\n    return {e};\n}}\n");
        let sites = enumerate_sites("f.c", &src, "f", &Operator::ALL, &SiteOptions::default()).unwrap();
        for m in generate_mutants(&src, &sites).unwrap() {
            let expected = format!("{}{}{}", &src[..m.site.start], m.replacement_token, &src[m.site.end..]);
            prop_assert_eq!(m.mutated_source.replacen("mut_f", "f", 1), expected);
        }
    }
}
