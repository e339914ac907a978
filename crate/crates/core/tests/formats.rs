use east_core::automaton::{self, read_rle, write_pgm, write_rle, Chain, RunOptions};
use east_core::dynamics;
use east_core::fragmentation::{backbone_legs, build_graph, connected_components, largest_sector, write_vertex_labels};
use east_core::spectral::{self, diagonalize};
use east_core::{build_hamiltonian, AssemblyMode, FockState, ModelSpec, SectorBasis, SparseOperator};

fn text(f: impl FnOnce(&mut Vec<u8>)) -> String {
    let mut buf = Vec::new();
    f(&mut buf);
    String::from_utf8(buf).unwrap()
}

fn l13() -> (ModelSpec, SectorBasis, SparseOperator) {
    let spec = ModelSpec::uniform(2).unwrap();
    let b = largest_sector(13, 5, &spec).unwrap();
    let h = build_hamiltonian(&b, &spec, AssemblyMode::Strict).unwrap();
    (spec, b, h)
}

#[test]
fn basis_dump_round_trips() {
    let (_, b, _) = l13();
    let dump = text(|w| b.write_dump(w).unwrap());
    let mut states = Vec::new();
    for (k, line) in dump.lines().enumerate() {
        let (ord, bits) = line.split_once('\t').unwrap();
        assert_eq!(ord.parse::<usize>().unwrap(), k);
        assert_eq!(bits.len(), 13);
        states.push(bits.parse::<FockState>().unwrap());
    }
    assert_eq!(states.len(), 273);
    assert_eq!(states[0], FockState::domain_wall(13, 5).unwrap());
    let back = SectorBasis::from_states(13, 5, None, states).unwrap();
    assert_eq!(back.bits(), b.bits());
}

#[test]
fn coordinate_dump_round_trips() {
    let (_, _, h) = l13();
    let dump = text(|w| h.write_coordinate(w).unwrap());
    let mut lines = dump.lines();
    let head: Vec<usize> = lines.next().unwrap().split(' ').map(|x| x.parse().unwrap()).collect();
    assert_eq!(head, vec![h.dim(), h.nnz()]);
    let mut entries = Vec::new();
    for line in lines {
        let f: Vec<&str> = line.split(' ').collect();
        let (r, c): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert!(r >= 1 && r < c && c <= h.dim());
        entries.push((r - 1, c - 1, f[2].parse::<f64>().unwrap()));
    }
    assert_eq!(entries.len(), h.nnz());
    let back = SparseOperator::from_entries(h.dim(), &entries).unwrap();
    assert_eq!(back.entries().collect::<Vec<_>>(), h.entries().collect::<Vec<_>>());
}

#[test]
fn edge_list_and_labels() {
    let (spec, b, _) = l13();
    let g = build_graph(&b, &spec).unwrap();
    let edges = text(|w| g.write_edge_list(w).unwrap());
    let parsed: Vec<(usize, usize)> = edges
        .lines()
        .map(|l| {
            let (u, v) = l.split_once(' ').unwrap();
            (u.parse().unwrap(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(parsed, g.edges().collect::<Vec<_>>());
    assert_eq!(parsed.len(), g.edge_count());

    let comps = connected_components(&g);
    let legs = backbone_legs(&g);
    let labels = text(|w| write_vertex_labels(w, &g, &comps, &legs).unwrap());
    assert_eq!(labels.lines().count(), b.len());
    for (v, line) in labels.lines().enumerate() {
        let f: Vec<i64> = line.split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 4);
        assert_eq!(f[0] as usize, v);
        assert_eq!(f[2], 0, "the sector is connected");
    }
}

#[test]
fn csv_headers() {
    let (_, b, h) = l13();
    let es = diagonalize(&h).unwrap();
    let spec_csv = text(|w| es.write_csv(w).unwrap());
    assert_eq!(spec_csv.lines().next(), Some("index,energy"));
    assert_eq!(spec_csv.lines().count(), 274);

    let e = es.energies();
    let hist = spectral::level_spacings(e, (e[0], 0.0), 5).unwrap();
    let hist_csv = text(|w| hist.write_csv(w).unwrap());
    assert_eq!(hist_csv.lines().next(), Some("s,density"));
    assert!((hist.total_mass() - 1.0).abs() < 1e-12);

    let psi0 = dynamics::product_state(&b, &FockState::domain_wall(13, 5).unwrap()).unwrap();
    let tr = dynamics::evolve_exact(&es, &b, &psi0, &[0.0, 0.5, 1.0], &[5, 8]).unwrap();
    let csv = text(|w| tr.write_csv(w).unwrap());
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 13 + 3);
    assert_eq!((header[0], header[1], header[13], header[14], header[15]), ("t", "n_1", "n_13", "F", "R"));
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[14] - 1.0).abs() < 1e-12);
    let ent = text(|w| tr.write_entropy_csv(w).unwrap());
    assert_eq!(ent.lines().next(), Some("t,S_5,S_8"));
    assert_eq!(ent.lines().count(), 4);
}

#[test]
fn rle_round_trips_and_rejects_garbage() {
    let run = automaton::run_automaton(130, 40, 500, None, &RunOptions::default()).unwrap();
    let mut buf = Vec::new();
    write_rle(&run.rows, 130, &mut buf).unwrap();
    assert_eq!(&buf[..8], b"EASTRLE1");
    assert_eq!(read_rle(buf.as_slice()).unwrap(), run.rows);

    let mut bad = buf.clone();
    bad[0] = b'X';
    assert!(read_rle(bad.as_slice()).is_err());
    assert!(read_rle(&buf[..buf.len() - 1]).is_err());

    let odd: Chain = "0111".parse().unwrap();
    let mut b2 = Vec::new();
    write_rle(&[odd.clone()], 4, &mut b2).unwrap();
    assert_eq!(read_rle(b2.as_slice()).unwrap(), vec![odd]);
    assert!(write_rle(&run.rows, 129, &mut Vec::new()).is_err());
}

#[test]
fn pgm_layout() {
    let rows: Vec<Chain> = ["1100", "1010"].iter().map(|s| s.parse().unwrap()).collect();
    let mut buf = Vec::new();
    write_pgm(&rows, 4, &mut buf).unwrap();
    let head = b"P5\n4 2\n255\n";
    assert_eq!(&buf[..head.len()], head);
    assert_eq!(&buf[head.len()..], &[0, 0, 255, 255, 0, 255, 0, 255]);
}

#[test]
fn zero_entropy_scan_csv() {
    let (_, b, h) = l13();
    let es = diagonalize(&h).unwrap();
    let scan = east_core::entanglement::zero_entropy_scan(&es, &b, east_core::entanglement::ZERO_ENTROPY_TOL).unwrap();
    let csv = text(|w| scan.write_csv(w).unwrap());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("cut,count"));
    let cuts: Vec<usize> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(cuts, (2..13).collect::<Vec<_>>());
}
