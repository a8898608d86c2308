mod common;

use coded_caching::decode::{verify_against, Decoder};
use coded_caching::{
    deliver, reconstruct_placement, verify_all, DecodeError, DeliveryChoice, DemandVector, Error,
    LocalCache, SystemParams,
};
use common::setup;

#[test]
fn every_demand_vector_decodes_for_three_users() {
    let s = setup(3, 3, 1.0, 1200, 0);
    let mut decoded = 0;
    for choice in [DeliveryChoice::ForceCoded, DeliveryChoice::ForceRlc] {
        for demands in DemandVector::all(3, 3) {
            let t = deliver(&s.caches, &s.files, &demands, &s.params, choice).unwrap();
            let report = verify_all(&s.caches, &t, &demands, &s.files).unwrap();
            assert!(report.all_decoded(), "{demands} via {choice:?}");
            decoded += 1;
        }
    }
    assert_eq!(decoded, 54);
}

#[test]
fn two_user_decode_walkthrough() {
    let s = setup(2, 2, 1.0, 10_000, 4);
    let demands = DemandVector::from_one_based(&[1, 2], 2).unwrap();
    let t = deliver(&s.caches, &s.files, &demands, &s.params, DeliveryChoice::ForceCoded).unwrap();
    let decoder = Decoder::for_demands(&s.caches, &demands).unwrap();
    let local = LocalCache::new(0, &s.caches, &s.files);
    let out = decoder.decode(0, &local, &t).unwrap();
    assert_eq!(&out[0], s.files.file(0));
}

#[test]
fn local_cache_refuses_bits_it_does_not_hold() {
    let s = setup(2, 2, 1.0, 100, 0);
    let local = LocalCache::new(0, &s.caches, &s.files);
    let missing = (0..100).find(|&b| !s.caches.holds(0, 1, b)).unwrap();
    assert!(matches!(
        local.bit(1, missing),
        Err(DecodeError::NotCached { user: 1, file: 2, .. })
    ));
    let held = s.caches.set(0, 1).iter().next().unwrap();
    assert_eq!(local.bit(1, held).unwrap(), s.files.bit(1, held));
}

#[test]
fn full_memory_decodes_from_cache_alone() {
    let s = setup(3, 2, 3.0, 300, 0);
    let demands = DemandVector::new(vec![1, 2], 3).unwrap();
    let t = deliver(&s.caches, &s.files, &demands, &s.params, DeliveryChoice::MinRate).unwrap();
    assert!(t.is_empty());
    assert!(verify_all(&s.caches, &t, &demands, &s.files).unwrap().all_decoded());
}

#[test]
fn dropping_a_message_names_the_affected_users() {
    let s = setup(3, 3, 1.5, 3000, 2);
    let demands = DemandVector::distinct(3, 3).unwrap();
    let mut t = deliver(&s.caches, &s.files, &demands, &s.params, DeliveryChoice::ForceCoded).unwrap();
    // the first message is the one sent to all three users
    t.messages.remove(0);
    let report = verify_all(&s.caches, &t, &demands, &s.files).unwrap();
    assert!(!report.all_decoded());
    assert_eq!(report.failed_users(), vec![1, 2, 3]);

    let mut t = deliver(&s.caches, &s.files, &demands, &s.params, DeliveryChoice::ForceCoded).unwrap();
    let last = t.messages.len() - 1;
    t.messages.remove(last);
    let report = verify_all(&s.caches, &t, &demands, &s.files).unwrap();
    assert_eq!(report.failed_users(), vec![3]);
}

#[test]
fn dropping_a_file_combination_leaves_rank_deficient() {
    let s = setup(2, 2, 0.5, 500, 2);
    let demands = DemandVector::new(vec![0, 0], 2).unwrap();
    let mut t = deliver(&s.caches, &s.files, &demands, &s.params, DeliveryChoice::ForceRlc).unwrap();
    let keep = s.caches.set(0, 0).missing().len().min(s.caches.set(1, 0).missing().len()) - 1;
    t.messages.truncate(keep);
    let report = verify_all(&s.caches, &t, &demands, &s.files).unwrap();
    assert_eq!(report.failed_users(), vec![1, 2]);
    assert!(report
        .users
        .iter()
        .all(|u| matches!(u.error, Some(DecodeError::RankDeficient { .. }))));
}

#[test]
fn flipping_a_payload_bit_breaks_decoding() {
    let s = setup(3, 3, 1.0, 2000, 5);
    let demands = DemandVector::new(vec![0, 2, 1], 3).unwrap();
    for choice in [DeliveryChoice::ForceCoded, DeliveryChoice::ForceRlc] {
        let mut t = deliver(&s.caches, &s.files, &demands, &s.params, choice).unwrap();
        t.messages[0].payload.toggle(0);
        let report = verify_all(&s.caches, &t, &demands, &s.files).unwrap();
        assert!(!report.all_decoded(), "{choice:?}");
    }
}

#[test]
fn placement_is_rebuilt_from_announced_seeds() {
    let s = setup(4, 3, 1.0, 800, 13);
    let rebuilt = reconstruct_placement(s.caches.seeds(), &s.params).unwrap();
    assert_eq!(rebuilt, s.caches);
    assert!(matches!(
        reconstruct_placement(&s.caches.seeds()[..2], &s.params),
        Err(Error::PlacementMismatch(_))
    ));

    // any subset of announced users yields their own caches
    let subset = [2usize, 0];
    let seeds: Vec<u64> = subset.iter().map(|&k| s.caches.seeds()[k]).collect();
    let params = SystemParams::new(4, 2, 1.0, 800, 13).unwrap();
    let partial = reconstruct_placement(&seeds, &params).unwrap();
    assert_eq!(partial, s.caches.select_users(&subset));
}

#[test]
fn wrong_announced_seed_fails_verification() {
    let s = setup(3, 3, 1.0, 1200, 1);
    let demands = DemandVector::distinct(3, 3).unwrap();
    let t = deliver(&s.caches, &s.files, &demands, &s.params, DeliveryChoice::ForceCoded).unwrap();
    let mut seeds = s.caches.seeds().to_vec();
    seeds[1] ^= 1;
    let public = reconstruct_placement(&seeds, &s.params).unwrap();
    let report = verify_against(&public, &s.caches, &t, &demands, &s.files).unwrap();
    assert!(!report.all_decoded());
}

#[test]
fn same_file_requests_decode_under_both_procedures() {
    let s = setup(2, 4, 0.8, 1500, 3);
    let demands = DemandVector::new(vec![1, 1, 0, 1], 2).unwrap();
    for choice in [
        DeliveryChoice::ForceCoded,
        DeliveryChoice::ForceRlc,
        DeliveryChoice::MinRate,
    ] {
        let t = deliver(&s.caches, &s.files, &demands, &s.params, choice).unwrap();
        assert!(verify_all(&s.caches, &t, &demands, &s.files).unwrap().all_decoded());
    }
}
