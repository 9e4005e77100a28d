mod common;

use proptest::prelude::*;

use common::*;
use modelforge::flatten::flatten_theory;
use modelforge::ground::VariableMap;
use modelforge::lang::{parse_input, SymbolKind};
use modelforge::model::{parse_parsable, print_parsable, FirstOrderModel, Table};
use modelforge::sat::{solve, Cnf, SatLimits, SatOutcome};

fn printed(input: &str) -> Vec<String> {
    let p = parse_input(input).unwrap();
    p.theory
        .iter()
        .map(|c| c.display(&p.symbols).to_string())
        .collect()
}

fn as_input(clauses: &[String]) -> String {
    let mut s = String::from("list(usable).\n");
    for c in clauses {
        s.push_str(&format!("{c}.\n"));
    }
    s + "end_of_list.\n"
}

fn cnf_strategy() -> impl Strategy<Value = Vec<Vec<i32>>> {
    let lit = (1i32..=6, any::<bool>()).prop_map(|(v, pos)| if pos { v } else { -v });
    prop::collection::vec(prop::collection::vec(lit, 1..4), 0..12)
}

fn model_strategy() -> impl Strategy<Value = FirstOrderModel> {
    (
        1u32..=3,
        prop::collection::vec((any::<bool>(), 0usize..=2), 1..4),
    )
        .prop_flat_map(|(n, shapes)| {
            let tables: Vec<_> = shapes
                .into_iter()
                .enumerate()
                .map(|(i, (is_f, arity))| {
                    let size = (n as usize).pow(arity as u32);
                    let bound = if is_f { n } else { 2 };
                    prop::collection::vec(0..bound, size).prop_map(move |values| Table {
                        name: format!("{}{i}", if is_f { "f" } else { "r" }),
                        kind: if is_f {
                            SymbolKind::Function
                        } else {
                            SymbolKind::Relation
                        },
                        arity,
                        values,
                    })
                })
                .collect();
            tables.prop_map(move |tables| FirstOrderModel { n, tables })
        })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn printed_clauses_reparse_to_themselves(seed in any::<u64>()) {
        let theory = random_theory(&mut Seeded::new(seed));
        let once = printed(&theory.to_input());
        let twice = printed(&as_input(&once));
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn flattening_is_stable_under_reprinting(seed in any::<u64>()) {
        let input = random_theory(&mut Seeded::new(seed)).to_input();
        let flat = |text: &str| {
            let p = parse_input(text).unwrap();
            flatten_theory(&p.theory, &p.symbols)
                .iter()
                .map(|c| c.display(&p.symbols).to_string())
                .collect::<Vec<_>>()
        };
        prop_assert_eq!(flat(&input), flat(&as_input(&printed(&input))));
    }

    #[test]
    fn unit_subsumption_never_changes_results(clauses in cnf_strategy()) {
        let cnf = Cnf::from_clauses(&clauses);
        let run = |s| {
            let limits = SatLimits {
                max_models: u64::MAX,
                max_seconds: None,
                max_kbytes: None,
                unit_subsumption: s,
            };
            let mut models = Vec::new();
            let out = solve(&cnf, &limits, |m| models.push(m.to_vec()));
            models.sort();
            (out, models)
        };
        let (plain, with_s) = (run(false), run(true));
        prop_assert_eq!(&plain, &with_s);
        let expected = truth_table_count(&clauses);
        prop_assert_eq!(plain.0.models(), expected);
        prop_assert!(expected > 0 || plain.0 == SatOutcome::Unsatisfiable);
    }

    #[test]
    fn parsable_output_round_trips(model in model_strategy()) {
        // functions are printed before relations
        let sorted = |mut m: FirstOrderModel| {
            m.tables.sort_by(|a, b| a.name.cmp(&b.name));
            m
        };
        let text = print_parsable(&model);
        prop_assert_eq!(sorted(parse_parsable(&text).unwrap()), sorted(model));
    }

    #[test]
    fn variable_map_is_a_bijection(seed in any::<u64>(), n in 1u32..=4) {
        let input = random_theory(&mut Seeded::new(seed)).to_input();
        let p = parse_input(&input).unwrap();
        let map = VariableMap::new(&p.symbols, n).unwrap();
        for v in 1..=map.total() as u32 {
            let (sym, tuple) = map.decode(v).unwrap();
            prop_assert_eq!(map.encode(sym, &tuple), v as i32);
        }
        prop_assert!(map.decode(map.total() as u32 + 1).is_none());
    }
}
