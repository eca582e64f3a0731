use eulerdd::analysis::builtin;
use eulerdd::cayley::{eulerian_cycle, validate_path};

#[test]
fn every_vertex_is_entered_once_per_color() {
    for name in ["carr-purcell", "pauli", "spin-flip", "symmetric-s3"] {
        let s = builtin(name, None, 0).unwrap();
        let n = s.group.order();
        let colors = s.graph.color_count();
        for start in [0, n - 1] {
            let path = eulerian_cycle(&s.graph, start).unwrap();
            assert!(validate_path(&s.graph, path.colors()).is_valid());
            let verts = path.vertices(&s.graph, start);
            assert_eq!(verts.first(), verts.last());
            let mut hits = vec![vec![0usize; colors]; n];
            for (l, &col) in path.colors().iter().enumerate() {
                hits[verts[l + 1]][col] += 1;
            }
            assert!(hits.iter().flatten().all(|&h| h == 1), "{name}");
        }
    }
}

#[test]
fn pauli_path_grows_with_qubits() {
    for (q, len) in [(1, 8), (2, 64), (3, 384)] {
        let s = builtin("pauli", Some(q), 0).unwrap();
        assert_eq!(s.path_length(), len);
    }
}
