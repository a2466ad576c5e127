//! Property tests for the invariants of each module. Random inputs come from
//! seeded generators in `common`, driven by proptest seeds.

mod common;

use std::collections::BTreeSet;

use common::*;
use krnet::agent::{compare_with_reality, reality, SelfModel};
use krnet::lexicon::{LangTag, Lexicon};
use krnet::net::{Net, NodeId, PropertyName, Provenance, SensorAddress, SensorSignal, Value};
use krnet::reasoning::{
    collapse_to_action, collapse_to_object, expand, find_matches, query_has, shape, specialize, ConceptTemplate,
    EndpointChoice, Extension, Fragment, MineConfig, Pattern, PatternNode, mine_concepts,
};
use krnet::script::{self, ExecContext};
use krnet::sim::{capture_state, diff, diff_states, run_action, run_pending, snapshot, Snapshot, State};
use krnet::store::{self, StoreHandle};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn small_net(rng: &mut ChaCha8Rng, max_objects: usize, max_actions: usize) -> (Net, Lexicon) {
    let spec = NetSpec {
        objects: rng.gen_range(1..=max_objects),
        actions: rng.gen_range(0..=max_actions),
        extras: true,
    };
    random_net(rng, &spec)
}

/// Replaces node references by plain text so that renumbering on expansion
/// does not count as a difference.
fn without_refs(mut net: Net) -> Net {
    for id in net.node_ids() {
        let refs: Vec<PropertyName> = net
            .properties(id)
            .unwrap()
            .iter()
            .filter(|(_, r)| matches!(r.value(), Some(Value::Ref(_))))
            .map(|(n, _)| n.clone())
            .collect();
        for n in refs {
            net.set_property(id, n.as_str(), Value::text("ref"), Provenance::Asserted)
                .unwrap();
        }
    }
    net
}

/// A random connected region grown from one node.
fn random_region(rng: &mut ChaCha8Rng, net: &Net, max: usize) -> BTreeSet<NodeId> {
    let start = *net.node_ids().choose(rng).unwrap();
    let mut region = BTreeSet::from([start]);
    let target = rng.gen_range(1..=max);
    for _ in 0..target * 3 {
        if region.len() >= target {
            break;
        }
        let frontier: Vec<NodeId> = region
            .iter()
            .flat_map(|&n| net.neighbours(n))
            .filter(|n| !region.contains(n))
            .collect();
        match frontier.choose(rng) {
            Some(&n) => {
                region.insert(n);
            }
            None => break,
        }
    }
    region
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ids_are_monotonic_and_never_reused(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mut net = Net::new();
        let mut seen = BTreeSet::new();
        let mut last = 0;
        for _ in 0..200 {
            let objects: Vec<NodeId> = net.objects().map(|o| o.id()).collect();
            let id = if objects.is_empty() || rng.gen_bool(0.5) {
                net.add_object(no_props()).unwrap()
            } else if rng.gen_bool(0.7) {
                let t = *objects.choose(&mut rng).unwrap();
                net.add_action(None, t, None, no_props()).unwrap()
            } else {
                let n = *net.node_ids().choose(&mut rng).unwrap();
                net.erase_node(n).unwrap();
                continue;
            };
            prop_assert!(id.get() > last);
            prop_assert!(seen.insert(id));
            last = id.get();
        }
    }

    #[test]
    fn signal_identity(a in proptest::collection::vec("[a-z]{1,3}", 1..3),
                       b in proptest::collection::vec("[a-z]{1,3}", 1..3),
                       p in proptest::collection::vec(any::<u8>(), 0..4),
                       q in proptest::collection::vec(any::<u8>(), 0..4),
                       tick in 0u64..5) {
        let sa = SensorSignal::new(SensorAddress::new(a.clone()).unwrap(), p.clone(), tick);
        let sb = SensorSignal::new(SensorAddress::new(b.clone()).unwrap(), q.clone(), tick);
        prop_assert_eq!(sa == sb, a == b && p == q);
    }

    #[test]
    fn execution_is_deterministic_and_touches_only_set_targets(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (net, subject, object, _) = script_fixture(&mut rng);
        let program = random_program(&mut rng, 2);
        let ast = script::parse(&stmts_source(&program)).unwrap();
        let (mut one, mut two) = (net.clone(), net.clone());
        let r1 = script::execute(&ast, ExecContext::new(&mut one, Some(subject), object));
        let r2 = script::execute(&ast, ExecContext::new(&mut two, Some(subject), object));
        prop_assert_eq!(&r1, &r2);
        prop_assert_eq!(&one, &two);
        let written: BTreeSet<(NodeId, String)> = ast
            .lvalues()
            .into_iter()
            .map(|lv| (object, lv.name.as_str().to_string()))
            .collect();
        for ch in diff_states(&capture_state(&net), &capture_state(&one)) {
            prop_assert!(written.contains(&(ch.node, ch.name.as_str().to_string())));
        }
    }

    #[test]
    fn store_round_trip_and_single_hydration(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (net, lex) = small_net(&mut rng, 12, 12);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.krn");
        store::save(&net, &lex, &path).unwrap();
        let mut h = StoreHandle::open(&path).unwrap();
        let mut live = Net::new();
        let mut last = h.stats();
        let ids = net.node_ids();
        for _ in 0..30 {
            let id = *ids.choose(&mut rng).unwrap();
            h.load_stub(id, &mut live).unwrap();
            let names: Vec<String> = h.entry(id).unwrap().property_names().map(|n| n.to_string()).collect();
            if let Some(name) = names.choose(&mut rng) {
                let got = h.hydrate_property(id, name, &mut live).unwrap();
                prop_assert_eq!(Some(&got), net.value(id, name).unwrap());
            }
            let s = h.stats();
            prop_assert!(s.objects_hydrated >= last.objects_hydrated);
            prop_assert!(s.properties_hydrated >= last.properties_hydrated);
            prop_assert!(s.scripts_hydrated >= last.scripts_hydrated);
            prop_assert!(s.bytes_read >= last.bytes_read);
            last = s;
        }
        let distinct: usize = ids
            .iter()
            .filter_map(|&id| live.properties(id).ok())
            .map(|p| p.values().filter(|r| r.value().is_some()).count())
            .sum();
        prop_assert_eq!(h.stats().properties_hydrated as usize, distinct);
        let (back, back_lex) = h.load_full().unwrap();
        prop_assert_eq!(back, net);
        prop_assert_eq!(back_lex, lex);
    }

    #[test]
    fn collapse_then_expand_is_identity_up_to_isomorphism(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (net, _) = small_net(&mut rng, 6, 6);
        let original = without_refs(net);
        let region = random_region(&mut rng, &original, 6);
        let mut work = original.clone();
        let collapsed = if rng.gen_bool(0.5) {
            collapse_to_object(&mut work, &region)
        } else {
            collapse_to_action(&mut work, &region, EndpointChoice::default())
        };
        match collapsed {
            Ok(node) => {
                prop_assert!(work.validate_bipartite().is_empty());
                prop_assert!(symmetry_violations(&work).is_empty());
                if region.len() > 1 || work.action(node).is_none() {
                    expand(&mut work, node).unwrap();
                }
                prop_assert!(work.validate_bipartite().is_empty());
                prop_assert!(isomorphic(&work, &original, Compare::Full));
            }
            Err(_) => prop_assert_eq!(&work, &original),
        }
    }

    #[test]
    fn nested_collapse_round_trips(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (net, _) = small_net(&mut rng, 8, 8);
        let original = without_refs(net);
        let mut work = original.clone();
        let mut stack = Vec::new();
        for _ in 0..3 {
            let region = random_region(&mut rng, &work, 4);
            if region.len() < 2 {
                continue;
            }
            if let Ok(n) = collapse_to_object(&mut work, &region) {
                stack.push(n);
            }
        }
        // Any order: a later region may have swallowed an earlier complex node,
        // which then only becomes expandable once its container is expanded.
        while !stack.is_empty() {
            let live: Vec<usize> = (0..stack.len()).filter(|&i| work.contains(stack[i])).collect();
            let n = stack.remove(*live.choose(&mut rng).unwrap());
            let ex = expand(&mut work, n).unwrap();
            prop_assert!(symmetry_violations(&work).is_empty());
            for m in stack.iter_mut() {
                if let Some(&r) = ex.renamed.get(m) {
                    *m = r;
                }
            }
        }
        prop_assert!(isomorphic(&work, &original, Compare::Full));
    }

    #[test]
    fn diff_is_antisymmetric(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (mut net, _) = small_net(&mut rng, 8, 4);
        let a = snapshot(&mut net);
        for _ in 0..rng.gen_range(0..6) {
            let id = *net.node_ids().choose(&mut rng).unwrap();
            if rng.gen_bool(0.3) {
                let _ = net.erase_property(id, "colour");
            } else {
                let v = random_value(&mut rng, &[], 1);
                net.set_property(id, "colour", v, Provenance::Asserted).unwrap();
            }
        }
        let b = snapshot(&mut net);
        let forward = diff(&a, &b);
        let mut backward: Vec<_> = diff(&b, &a)
            .into_iter()
            .map(|mut c| {
                std::mem::swap(&mut c.before, &mut c.after);
                c
            })
            .collect();
        backward.sort_by(|x, y| (x.node, &x.name).cmp(&(y.node, &y.name)));
        prop_assert_eq!(forward, backward);
        prop_assert!(b.tick > a.tick);
    }

    #[test]
    fn compare_is_a_subset_of_diff(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (mut net, _) = small_net(&mut rng, 6, 2);
        let me = net.objects().next().unwrap().id();
        SelfModel::attach(&mut net, me).unwrap();
        let objects: Vec<NodeId> = net.objects().map(|o| o.id()).collect();
        let predicted = Snapshot { tick: 0, state: capture_state(&net) };
        for logged in 1..=rng.gen_range(1..6) {
            let o = *objects.choose(&mut rng).unwrap();
            let name = ["seen", "heard", "colour"][rng.gen_range(0..3)];
            let sig = net.capture(SensorAddress::new(["eye"]).unwrap(), vec![rng.gen_range(0..3)]);
            net.ingest_signal(o, name, sig).unwrap();
            prop_assert_eq!(net.sense_log().len(), logged);
        }
        let sensed = reality(&net);
        let cmp: BTreeSet<String> = compare_with_reality(&predicted, &sensed).iter().map(|c| format!("{c:?}")).collect();
        let all: BTreeSet<String> = diff(&predicted, &sensed).iter().map(|c| format!("{c:?}")).collect();
        prop_assert!(cmp.is_subset(&all));
        let covered = Snapshot {
            tick: 0,
            state: predicted.state.iter().filter(|(k, _)| sensed.state.contains_key(*k))
                .map(|(k, v)| (k.clone(), v.clone())).collect(),
        };
        prop_assert_eq!(compare_with_reality(&covered, &sensed), diff(&covered, &sensed));
    }

    #[test]
    fn lexicon_direct_hits_are_inverse(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (_, lex) = small_net(&mut rng, 10, 5);
        for (node, lang, text) in lex.labels() {
            let (got, used) = lex.label_of(node, lang).unwrap();
            prop_assert_eq!(used, lang);
            prop_assert_eq!(got, text);
            prop_assert!(lex.lookup(lang, got).contains(&node));
        }
        let probe = LangTag::new("it").unwrap();
        let mut copy = lex.clone();
        copy.set_fallback_chain(lex.fallback_chain().to_vec());
        for (node, _, _) in lex.labels() {
            prop_assert_eq!(lex.label_of(node, &probe).ok(), copy.label_of(node, &probe).ok());
        }
    }

    #[test]
    fn shaping_is_idempotent_and_asserts_no_values(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let mut net = Net::new();
        let concept = net.add_object([("kind", Value::Unset)]).unwrap();
        let parts = rng.gen_range(1..5);
        for i in 0..parts {
            let part = net.add_object([(["head", "arm", "leg", "tail"][i], Value::Unset)]).unwrap();
            net.add_action(Some(concept), part, None, [("has", Value::Unset)]).unwrap();
        }
        let inst = net.add_object([("kind", Value::text("peter"))]).unwrap();
        // Some parts may already be present on the instance.
        if rng.gen_bool(0.5) {
            let head = net.add_object([("head", Value::Number(1.0))]).unwrap();
            net.add_action(Some(inst), head, None, [("has", Value::Truth(true))]).unwrap();
        }
        net.add_isa(inst, concept).unwrap();
        let first = shape(&mut net, inst, concept).unwrap();
        for &n in &first {
            prop_assert_eq!(net.origin_of(n), Some(Provenance::Inferred));
            for r in net.properties(n).unwrap().values() {
                prop_assert_eq!(r.value(), Some(&Value::Unset));
            }
        }
        let after = net.clone();
        prop_assert!(shape(&mut net, inst, concept).unwrap().is_empty());
        prop_assert_eq!(&net, &after);
        prop_assert!(net.validate_bipartite().is_empty());
    }
}

#[test]
fn batch_equals_sequential_changes() {
    let mut rng = rng(77);
    for _ in 0..30 {
        let mut net = Net::new();
        let snail = net.add_object([("position", Value::Number(0.0))]).unwrap();
        let wall = net.add_object([("colour", Value::text("green"))]).unwrap();
        let crawl = net
            .add_action(Some(snail), snail, Some("set object.position = object.position + 1;"), no_props())
            .unwrap();
        let paint = net
            .add_action(Some(snail), wall, Some("if object.colour == \"green\" { set object.colour = \"black\"; } else { set object.colour = \"green\"; }"), no_props())
            .unwrap();
        let order: Vec<NodeId> = (0..rng.gen_range(1..6)).map(|_| if rng.gen_bool(0.5) { crawl } else { paint }).collect();
        let pre = capture_state(&net);
        let changes = run_pending(&mut net, &order, None).unwrap();
        let mut state: State = pre;
        for cs in &changes {
            for ch in cs.changes() {
                match &ch.after {
                    Some(v) => state.insert((ch.node, ch.name.clone()), v.clone()),
                    None => state.remove(&(ch.node, ch.name.clone())),
                };
            }
        }
        assert_eq!(state, capture_state(&net));
        let ticks: Vec<u64> = net.timeline().snapshots().iter().map(|s| s.tick).collect();
        assert!(ticks.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(net.timeline().len(), 2 + 2 * order.len());
    }
}

#[test]
fn diff_agrees_with_change_set() {
    let mut rng = rng(78);
    for _ in 0..200 {
        let (mut net, subject, object, _) = script_fixture(&mut rng);
        let program = random_program(&mut rng, 2);
        let act = net
            .add_action(Some(subject), object, Some(&stmts_source(&program)), no_props())
            .unwrap();
        let Ok(cs) = run_action(&mut net, act, None) else { continue };
        let snaps = net.timeline().snapshots();
        let (pre, post) = (&snaps[snaps.len() - 2], &snaps[snaps.len() - 1]);
        let key = |c: &krnet::script::PropertyChange| format!("{c:?}");
        let from_diff: Vec<String> = diff(pre, post).iter().map(key).collect();
        let mut from_log: Vec<_> = cs.net_effect();
        from_log.sort_by(|x, y| (x.node, &x.name).cmp(&(y.node, &y.name)));
        let from_log: Vec<String> = from_log.iter().map(key).collect();
        assert_eq!(from_diff, from_log);
    }
}

#[test]
fn subsumption_on_fixtures() {
    let mut nonempty = 0;
    for name in ["peter.krn", "mike.krn", "jack.krn", "tv.krn", "birds.krn"] {
        let (net, _) = store::parse_full(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
        // Parent: an object with one of its outgoing actions and that target.
        let Some(hub) = net.objects().find(|o| o.outgoing().len() >= 2) else { continue };
        let act = hub.outgoing()[0];
        let ids: BTreeSet<NodeId> = [hub.id(), act, net.action(act).unwrap().target()].into();
        let (mut pattern, order) = Pattern::from_subnet(&net, &ids).unwrap();
        pattern.root = order.iter().position(|&n| n == hub.id());
        let parent = ConceptTemplate { id: None, pattern, support: 0, parent: None };
        let r = parent.pattern.root.unwrap();
        let base_sets: BTreeSet<Vec<NodeId>> =
            find_matches(&parent.pattern, &net).into_iter().map(|m| m.mapping).collect();
        let extensions = [
            Extension {
                properties: vec![],
                nodes: vec![
                    PatternNode::object(Vec::new()),
                    PatternNode::action(Some(r), parent.pattern.len(), Vec::new()),
                ],
            },
            Extension {
                properties: vec![(r, pn("leg"))],
                nodes: vec![],
            },
        ];
        for extra in &extensions {
            let mut scratch = net.clone();
            let narrower = specialize(&mut scratch, &parent, extra).unwrap();
            assert!(scratch.validate_bipartite().is_empty());
            for m in find_matches(&narrower.pattern, &net) {
                nonempty += 1;
                let restricted = m.mapping[..parent.pattern.len()].to_vec();
                assert!(base_sets.contains(&restricted), "{name}: a specialised match is not a parent match");
            }
        }
    }
    assert!(nonempty > 0);
}

#[test]
fn self_node_is_ordinary() {
    let mut rng = rng(79);
    let (mut net, _) = small_net(&mut rng, 10, 10);
    let me = net.objects().next().unwrap().id();
    let mut model = SelfModel::attach(&mut net, me).unwrap();
    model
        .define_goal_text(&mut net, krnet::agent::Polarity::Goal, &format!("@{me} .colour == \"red\""))
        .unwrap();
    for _ in 0..2000 {
        let objects: Vec<NodeId> = net.objects().map(|o| o.id()).collect();
        let o = if rng.gen_bool(0.3) { me } else { *objects.choose(&mut rng).unwrap() };
        match rng.gen_range(0..4) {
            0 => {
                net.add_action(Some(o), *objects.choose(&mut rng).unwrap(), None, no_props()).unwrap();
            }
            1 => net.set_property(o, "colour", Value::text("red"), Provenance::Asserted).unwrap(),
            2 => {
                let sig = net.capture(SensorAddress::new(["skin"]).unwrap(), vec![1]);
                net.ingest_signal(o, "touch", sig).unwrap();
            }
            _ => {
                if let Some(&a) = net.object(o).unwrap().outgoing().first() {
                    net.erase_node(a).unwrap();
                }
            }
        }
        assert!(net.validate_bipartite().is_empty());
        assert!(symmetry_violations(&net).is_empty());
    }
    let region: BTreeSet<NodeId> = [me].into();
    if let Ok(n) = collapse_to_object(&mut net, &region) {
        expand(&mut net, n).unwrap();
    }
    let frag = Fragment::parse(".colour == \"red\"").unwrap();
    let _ = query_has(&mut net, me, &frag);
    assert_eq!(model.evaluate_goals(&net).len(), 1);
}

#[test]
fn reasoning_ignores_labels() {
    let read = |name: &str, keep_labels: bool| {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let text: String = text
            .lines()
            .filter(|l| keep_labels || !l.starts_with("LABEL "))
            .map(|l| format!("{l}\n"))
            .collect();
        store::parse_full(&text).unwrap()
    };
    let names = ["mike.krn", "jack.krn", "peter.krn", "tv.krn"];
    let labelled: Vec<Net> = names.iter().map(|n| read(n, true).0).collect();
    let bare: Vec<(Net, Lexicon)> = names.iter().map(|n| read(n, false)).collect();
    assert!(bare.iter().all(|(_, l)| l.label_count() == 0));
    let bare: Vec<Net> = bare.into_iter().map(|(n, _)| n).collect();
    assert_eq!(labelled, bare);
    let cfg = MineConfig::default();
    assert_eq!(mine_concepts(&labelled, cfg).unwrap(), mine_concepts(&bare, cfg).unwrap());
    let (p, _) = Pattern::component(&bare[0], bare[0].node_ids()[0]).unwrap();
    assert_eq!(find_matches(&p, &bare[1]), find_matches(&p, &labelled[1]));
}
