//! Property-based invariants.

mod common;

use proptest::prelude::*;

use qhc::formula::{subst_term, typecheck, Formula, Signature, Sort, Term};
use qhc::parser::parse_formula;
use qhc::printer::{pretty, pretty_modal};
use qhc::schema::{match_schema, Binding, BoundValue, MetaTable, Schema};
use qhc::translate;

fn sig() -> Signature {
    Signature::default_cli()
}

/// Well-typed propositional formulas of either sort over the ambient
/// signature.
fn arb_formula() -> impl Strategy<Value = Formula> {
    (any::<u64>(), 0usize..2).prop_map(|(seed, sort)| {
        let mut r = common::rng(seed);
        let sort = if sort == 0 {
            Sort::Problem
        } else {
            Sort::Proposition
        };
        common::random_formula(&mut r, sort, 4)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn pretty_print_parses_back_to_the_same_tree(f in arb_formula()) {
        let s = sig();
        let printed = pretty(&f);
        let reparsed = parse_formula(&printed, &s).expect("printed form parses");
        prop_assert_eq!(&reparsed, &f);
        // the modal style is also round-trip safe
        let printed = pretty_modal(&f);
        let reparsed = parse_formula(&printed, &s).expect("modal form parses");
        prop_assert_eq!(reparsed, f);
    }

    #[test]
    fn substituting_a_variable_for_itself_is_the_identity(f in arb_formula()) {
        prop_assert_eq!(subst_term(&f, "x", &Term::var("x")).unwrap(), f);
    }

    #[test]
    fn translations_are_total_and_preserve_typing(f in arb_formula()) {
        let s = sig();
        let sort = typecheck(&f, &s).unwrap();
        let boxed = translate::box_translate(&f, &s);
        prop_assert_eq!(
            typecheck(&boxed, &s.retyped(Sort::Proposition)).unwrap(),
            Sort::Proposition
        );
        prop_assert!(boxed.in_box_fragment());
        let nn = translate::negneg_translate(&f, &s);
        prop_assert_eq!(
            typecheck(&nn, &s.retyped(Sort::Problem)).unwrap(),
            Sort::Problem
        );
        prop_assert!(nn.is_modality_free());
        let nabla = translate::nabla_translate(&f, &s);
        prop_assert_eq!(typecheck(&nabla, &s).unwrap(), sort);
        let dia = translate::diamond_translate(&f, &s);
        prop_assert_eq!(typecheck(&dia, &s).unwrap(), sort);
    }

    #[test]
    fn typing_is_stable_under_schema_instantiation(seed in any::<u64>()) {
        let s = sig();
        let mut metas = MetaTable::new();
        metas.declare_formula("A", Sort::Problem, 0);
        metas.declare_formula("P", Sort::Proposition, 0);
        let body = parse_formula("(A -> !P) -> !(?A -> P)", &metas.as_signature()).unwrap();
        let schema = Schema::new(metas, body);
        let mut r = common::rng(seed);
        let mut binding = Binding::new();
        binding.insert(
            "A".into(),
            BoundValue::closed(common::random_formula(&mut r, Sort::Problem, 3)),
        );
        binding.insert(
            "P".into(),
            BoundValue::closed(common::random_formula(&mut r, Sort::Proposition, 3)),
        );
        let inst = schema.instantiate(&binding, &s).unwrap();
        prop_assert_eq!(typecheck(&inst, &s).unwrap(), Sort::Problem);
        // instantiation is deterministic
        prop_assert_eq!(schema.instantiate(&binding, &s).unwrap(), inst.clone());
        // and the binding is recoverable from the instance
        let recovered = match_schema(&schema.body, &schema.metas, &inst).unwrap();
        prop_assert_eq!(schema.instantiate(&recovered, &s).unwrap(), inst);
    }
}

/// Injectivity of instantiation on bindings, checked by enumeration:
/// distinct bindings give distinct instances when the schema mentions
/// every metavariable.
#[test]
fn instantiation_is_injective_on_bindings() {
    let s = sig();
    let mut metas = MetaTable::new();
    metas.declare_formula("A", Sort::Problem, 0);
    metas.declare_formula("B", Sort::Problem, 0);
    let body = parse_formula("A -> (B -> A & B)", &metas.as_signature()).unwrap();
    let schema = Schema::new(metas, body);
    let values = [
        Formula::atom("a"),
        Formula::atom("b"),
        Formula::FalseI,
        Formula::and(Formula::atom("a"), Formula::atom("b")),
        Formula::neg(Formula::atom("a"), Sort::Problem),
    ];
    let mut seen = std::collections::HashMap::new();
    for va in &values {
        for vb in &values {
            let mut binding = Binding::new();
            binding.insert("A".into(), BoundValue::closed(va.clone()));
            binding.insert("B".into(), BoundValue::closed(vb.clone()));
            let inst = schema.instantiate(&binding, &s).unwrap();
            if let Some(previous) = seen.insert(pretty(&inst), (va.clone(), vb.clone())) {
                panic!(
                    "bindings {:?} and {:?} collide on {}",
                    previous,
                    (va, vb),
                    pretty(&inst)
                );
            }
        }
    }
}

/// A successfully instantiated schema leaves no hidden capture: free
/// variables of the instance are exactly those contributed by the
/// binding values outside their slots.
#[test]
fn accepted_instances_respect_side_conditions() {
    let mut s = Signature::new();
    s.declare("r", Sort::Problem, 2).unwrap();
    s.declare("c", Sort::Problem, 1).unwrap();
    let mut metas = MetaTable::new();
    metas.declare_formula("A", Sort::Problem, 1);
    metas.declare_formula("C", Sort::Problem, 0);
    let body = parse_formula(
        "forall x. (C -> A(x)) -> (C -> forall x. A(x))",
        &metas.as_signature(),
    )
    .unwrap();
    let schema = Schema::new(metas, body);
    let mut binding = Binding::new();
    binding.insert(
        "A".into(),
        BoundValue::Formula {
            params: vec!["x".into()],
            body: parse_formula("r(x,y)", &s).unwrap(),
        },
    );
    binding.insert(
        "C".into(),
        BoundValue::closed(parse_formula("c(y)", &s).unwrap()),
    );
    let inst = schema.instantiate(&binding, &s).unwrap();
    // y stays free; x is bound by the schema's quantifiers
    assert_eq!(
        inst.free_vars().into_iter().collect::<Vec<_>>(),
        vec!["y".to_string()]
    );
    // a binding that would need capture is rejected outright
    binding.insert(
        "C".into(),
        BoundValue::closed(parse_formula("c(x)", &s).unwrap()),
    );
    assert!(schema.instantiate(&binding, &s).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// The parser is total: arbitrary input produces a result, never a
    /// panic.
    #[test]
    fn parser_never_panics(input in ".{0,80}") {
        let s = sig();
        let _ = qhc::parser::parse_formula(&input, &s);
        let _ = qhc::parser::parse_signature(&input);
        let _ = qhc::script::parse_proof_script(&input);
        let _ = qhc::script::parse_entry(&input);
        let _ = qhc::script::parse_theory(&input);
    }
}
