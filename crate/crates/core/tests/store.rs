//! Store behaviour checked from outside: record counts from a plain line
//! scan, open-time statistics, and read volume independent of net size.

mod common;

use common::*;
use krnet::lexicon::Lexicon;
use krnet::net::{Net, Value};
use krnet::store::{self, HydrationStats, StoreError, StoreHandle};
use rand::Rng;

#[test]
fn index_counts_node_records() {
    let mut rng = rng(31);
    let dir = tempfile::tempdir().unwrap();
    for i in 0..20 {
        let spec = NetSpec {
            objects: rng.gen_range(1..20),
            actions: rng.gen_range(0..20),
            extras: true,
        };
        let (net, lex) = random_net(&mut rng, &spec);
        let path = dir.path().join(format!("{i}.krn"));
        store::save(&net, &lex, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let records = text
            .lines()
            .filter(|l| l.starts_with("OBJ ") || l.starts_with("ACT "))
            .count();
        let h = StoreHandle::open(&path).unwrap();
        assert_eq!(h.index_len(), records);
        assert_eq!(h.index_len(), net.node_count());
        let s = h.stats();
        assert_eq!(
            (s.objects_hydrated, s.properties_hydrated, s.scripts_hydrated),
            (0, 0, 0)
        );
        assert_eq!(s.bytes_read, text.len() as u64);
    }
}

fn big_store(n: usize, dir: &std::path::Path) -> (std::path::PathBuf, Net) {
    let mut net = Net::new();
    for i in 0..n {
        net.add_object([("index", Value::Number(i as f64)), ("name", Value::text(format!("o{i}")))])
            .unwrap();
    }
    let path = dir.join(format!("big{n}.krn"));
    store::save(&net, &Lexicon::new(), &path).unwrap();
    (path, net)
}

#[test]
fn stub_reads_do_not_grow_with_net_size() {
    let dir = tempfile::tempdir().unwrap();
    let mut extra = Vec::new();
    for n in [10, 100, 1000] {
        let (path, net) = big_store(n, dir.path());
        let mut h = StoreHandle::open(&path).unwrap();
        let scan = h.stats().bytes_read;
        let id = net.node_ids()[n / 2];
        let mut live = Net::new();
        h.load_stub(id, &mut live).unwrap();
        let record = h.entry(id).unwrap().total_bytes();
        let read = h.stats().bytes_read - scan;
        assert!(read <= record, "{read} > {record}");
        assert!(h.stats().objects_hydrated <= 1);
        extra.push(read);
    }
    assert!(extra.windows(2).all(|w| w[1] <= w[0] + 8), "{extra:?}");
}

#[test]
fn damaged_files_report_lines() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = big_store(5, dir.path());
    let text = std::fs::read_to_string(&path).unwrap();
    let cases = [
        (text[..text.len() - 3].to_string(), "truncated"),
        (text.replace("PROP 3 index num 2", "PROP 3 index num two"), "bad number"),
        (format!("{text}ACT 99 1 42\n"), "dangling target"),
        (text.replacen("KRN 1", "KRN 9", 1), "bad header"),
    ];
    for (body, what) in cases {
        let p = dir.path().join("bad.krn");
        std::fs::write(&p, body).unwrap();
        match StoreHandle::open(&p) {
            Err(StoreError::Format { .. }) => {}
            other => panic!("{what}: expected a format error, got {:?}", other.map(|h| h.stats())),
        }
    }
}

#[test]
fn stats_start_at_zero_and_only_grow() {
    let dir = tempfile::tempdir().unwrap();
    let (path, net) = big_store(50, dir.path());
    let mut h = StoreHandle::open(&path).unwrap();
    let mut live = Net::new();
    let mut last = HydrationStats { bytes_read: 0, ..h.stats() };
    for id in net.node_ids().into_iter().step_by(7) {
        h.load_stub(id, &mut live).unwrap();
        h.hydrate_node(id, &mut live).unwrap();
        h.evict(id, &mut live).unwrap();
        h.hydrate_property(id, "name", &mut live).unwrap();
        let s = h.stats();
        assert!(s.objects_hydrated >= last.objects_hydrated && s.bytes_read >= last.bytes_read);
        assert!(s.properties_hydrated >= last.properties_hydrated);
        last = s;
    }
}
