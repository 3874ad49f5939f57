use hanoi_dimer_core::fixtures::reference;
use hanoi_dimer_core::multipoly::VarSet;
use hanoi_dimer_core::recursion_gen::{
    expand_mixed, generate, mixed_recursion, mixed_vars, ratio_form, ratio_vars, LabeledCensus, RecursionSystem, Target,
    DEFAULT_CENSUS_MAX_D,
};

const CLASS_KEYS: [&str; 5] = ["f", "g", "h", "t", "s"];

#[test]
fn generated_system_serializes_like_printed_one() {
    let printed = reference().d3.recursion_system().unwrap().unwrap();
    let generated = generate(3).unwrap();
    assert_eq!(generated.to_cache_text(), printed.to_cache_text());
    assert_eq!(generated, printed);
}

#[test]
fn mixed_recursions_match_printed_ones() {
    let census = LabeledCensus::compute(3, DEFAULT_CENSUS_MAX_D).unwrap();
    let vars = mixed_vars(3);
    let targets = CLASS_KEYS
        .iter()
        .enumerate()
        .map(|(k, key)| (*key, Target::class(3, k)))
        .chain(std::iter::once(("M", Target::Total)));
    for (key, target) in targets {
        let printed = reference().d3.mixed_recursion(key).unwrap().unwrap().with_vars(&vars).unwrap();
        let generated = mixed_recursion(&census, &target);
        assert_eq!(generated.serialize(), printed.serialize(), "{key}");
    }
}

#[test]
fn printed_mixed_recursions_expand_to_printed_system() {
    let sys = reference().d3.recursion_system().unwrap().unwrap();
    for (k, key) in CLASS_KEYS.iter().enumerate() {
        let mixed = reference().d3.mixed_recursion(key).unwrap().unwrap().with_vars(&mixed_vars(3)).unwrap();
        assert_eq!(expand_mixed(3, &mixed), *sys.class(k), "{key}");
    }
}

#[test]
fn ratio_forms_match_printed_ones() {
    let forms = ratio_form(&generate(3).unwrap());
    let vars = ratio_vars(3);
    for (k, key) in ["A", "B", "C", "D", "E"].iter().enumerate() {
        let printed = reference().d3.ratio_form(key).unwrap().unwrap().with_vars(&vars).unwrap();
        assert_eq!(forms.forms()[k].serialize(), printed.serialize(), "{key}");
    }
}

#[test]
fn cache_text_round_trips() {
    let sys = generate(3).unwrap();
    let text = sys.to_cache_text();
    let back = RecursionSystem::from_cache_text(&text).unwrap();
    assert_eq!(back.to_cache_text(), text);
    assert!(text.starts_with("# d=3 basis=c0..c4\nc0: 64*c0^4 + "));
}

#[test]
fn printed_polynomials_reserialize_to_fixpoint() {
    let vars = VarSet::new(["c0", "c1", "c2", "c3", "c4"]);
    let sys = reference().d3.recursion_system().unwrap().unwrap();
    for p in sys.classes() {
        let once = p.serialize();
        let again = hanoi_dimer_core::multipoly::Polynomial::parse(&once, &vars).unwrap().serialize();
        assert_eq!(once, again);
    }
}
