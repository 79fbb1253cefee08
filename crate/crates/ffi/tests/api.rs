use std::ffi::{CStr, CString};
use std::ptr;

use graphorder::checkpoint::Checkpoint;
use graphorder::init_don;
use graphorder_ffi::*;

fn last_error() -> String {
    let p = gord_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

/// Arcs 0->1, 1->0, 0->3, 0->4 on five vertices.
fn fixture() -> *mut GordGraph {
    let src = [0usize, 1, 0, 0];
    let dst = [1usize, 0, 3, 4];
    let mut g = ptr::null_mut();
    let status = unsafe { gord_graph_from_arcs(5, src.as_ptr(), dst.as_ptr(), 4, &mut g) };
    assert_eq!(status, GordStatus::Ok);
    g
}

#[test]
fn graph_queries_and_scores() {
    let g = fixture();
    unsafe {
        assert_eq!(gord_graph_vertex_count(g), 5);
        assert_eq!(gord_graph_arc_count(g), 4);
        assert_eq!(gord_graph_edge_count(g), 3);
        let mut s = 0;
        assert_eq!(gord_similarity(g, 0, 1, &mut s), GordStatus::Ok);
        assert_eq!(s, 2);

        let mut order = [0usize; 5];
        assert_eq!(gord_go_order(g, 3, order.as_mut_ptr(), 5), GordStatus::Ok);
        assert_eq!(order, [0, 1, 3, 4, 2]);
        let mut f = 0;
        assert_eq!(gord_f_score(g, order.as_ptr(), 5, 3, &mut f), GordStatus::Ok);
        assert_eq!(f, 7);

        assert_eq!(gord_degree_order(g, order.as_mut_ptr(), 5), GordStatus::Ok);
        assert_eq!(order[0], 0);
        gord_graph_free(g);
    }
}

#[test]
fn errors_set_status_and_message() {
    let g = fixture();
    unsafe {
        let mut s = 0;
        assert_eq!(gord_similarity(g, 2, 2, &mut s), GordStatus::InvalidArgument);
        assert!(!last_error().is_empty());

        let mut small = [0usize; 3];
        assert_eq!(gord_go_order(g, 3, small.as_mut_ptr(), 3), GordStatus::BufferTooSmall);
        assert_eq!(gord_go_order(g, 0, small.as_mut_ptr(), 3), GordStatus::InvalidArgument);
        assert_eq!(gord_go_order(ptr::null(), 3, small.as_mut_ptr(), 3), GordStatus::NullPointer);

        let bad_order = [0usize, 0, 1, 2, 3];
        let mut f = 0;
        assert_eq!(gord_f_score(g, bad_order.as_ptr(), 5, 2, &mut f), GordStatus::InvalidArgument);

        let text = CString::new("0 1\n1 q\n").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(gord_graph_parse(text.as_ptr(), &mut h), GordStatus::Parse);
        assert!(last_error().contains("line 2"));
        assert!(h.is_null());

        let path = CString::new("/nonexistent/graph.txt").unwrap();
        assert_eq!(gord_graph_read(path.as_ptr(), &mut h), GordStatus::Io);
        assert!(last_error().contains("/nonexistent/graph.txt"));
        gord_graph_free(g);
        gord_graph_free(ptr::null_mut());
    }
}

#[test]
fn partition_and_compression() {
    let text = CString::new("0 1\n0 2\n0 3\n0 4\n").unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(gord_graph_parse(text.as_ptr(), &mut g), GordStatus::Ok);
        let order = [0usize, 1, 2, 3, 4];
        let mut parts = [9usize; 4];
        let mut rf = 0.0;
        let status = gord_partition(
            g,
            GordPartitionMethod::OrderSweep,
            2,
            order.as_ptr(),
            5,
            0,
            parts.as_mut_ptr(),
            4,
            &mut rf,
        );
        assert_eq!(status, GordStatus::Ok);
        assert_eq!(parts, [0, 0, 1, 1]);
        assert!((rf - 1.2).abs() < 1e-12);

        let status = gord_partition(g, GordPartitionMethod::Greedy, 1, ptr::null(), 0, 0, ptr::null_mut(), 0, &mut rf);
        assert_eq!(status, GordStatus::Ok);
        assert_eq!(rf, 1.0);
        let status = gord_partition(g, GordPartitionMethod::OrderSweep, 9, order.as_ptr(), 5, 0, ptr::null_mut(), 0, &mut rf);
        assert_eq!(status, GordStatus::InvalidArgument);

        let (mut nz, mut ratio) = (0usize, 0.0);
        assert_eq!(gord_compression_cost(g, order.as_ptr(), 5, 2, &mut nz, &mut ratio), GordStatus::Ok);
        assert_eq!(nz, 3);
        assert!((ratio - 1.0 / 3.0).abs() < 1e-12);
        gord_graph_free(g);
    }
}

#[test]
fn model_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.ckpt");
    Checkpoint::Don(init_don(5, 8, 4, 8, 3).unwrap()).save(&path).unwrap();
    let cpath = CString::new(path.to_str().unwrap()).unwrap();
    let g = fixture();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(gord_model_load(cpath.as_ptr(), &mut m), GordStatus::Ok);
        assert_eq!(gord_model_vertex_count(m), 5);
        let mut order = [0usize; 5];
        assert_eq!(gord_don_order(m, g, 3, order.as_mut_ptr(), 5), GordStatus::Ok);
        let mut sorted = order;
        sorted.sort();
        assert_eq!(sorted, [0, 1, 2, 3, 4]);
        assert_eq!(order[0], 0);
        gord_model_free(m);

        std::fs::write(&path, b"junk").unwrap();
        assert_eq!(gord_model_load(cpath.as_ptr(), &mut m), GordStatus::Checkpoint);
        gord_graph_free(g);
    }
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(gord_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
