//! Scheme-level behaviour on a small parameter set.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use std::sync::OnceLock;
use tracesig::encoding::{Decode, Encode};
use tracesig::lattice::{bin_decompose, gadget_matrix, IntMatrix, ParamSet, ZqMatrix, ZqVector};
use tracesig::scheme::*;
use tracesig::sigs::{tagsig_verify, usersig_keygen, UserSigningKey};
use tracesig::Error;

struct Group {
    keys: GroupKeys,
    members: Vec<(u64, UserSecret, Certificate)>,
    sigs: Vec<(Vec<u8>, GroupSignature)>,
}

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn small() -> ParamSet {
    setup(4, 3).unwrap()
}

fn join(keys: &mut GroupKeys, r: &mut ChaCha20Rng) -> tracesig::Result<(u64, UserSecret, Certificate)> {
    let (_, mut user_sk) = usersig_keygen(r);
    let (req, pending) = join_user_request(&keys.gpk, &mut user_sk, r)?;
    let resp = join_gm_process(&keys.gsk, &keys.gpk, &mut keys.registry, &req, r)?;
    join_user_finalize(&keys.gpk, &pending, &resp)
}

/// Three members, each with one signature on its own message.
fn group() -> &'static Group {
    static G: OnceLock<Group> = OnceLock::new();
    G.get_or_init(|| {
        let mut r = rng(1);
        let mut keys = keygen(&small(), &mut r).unwrap();
        let members: Vec<_> = (0..3).map(|_| join(&mut keys, &mut r).unwrap()).collect();
        let sigs = members
            .iter()
            .map(|(id, usk, cert)| {
                let msg = format!("message from {id}").into_bytes();
                let s = sign(&keys.gpk, usk, cert, &msg, &mut r).unwrap();
                (msg, s)
            })
            .collect();
        Group { keys, members, sigs }
    })
}

fn stack_with_identity(r: &IntMatrix) -> IntMatrix {
    let mut data = r.data.clone();
    for i in 0..r.cols {
        data.extend((0..r.cols).map(|j| (i == j) as i64));
    }
    IntMatrix::new(r.rows + r.cols, r.cols, data).unwrap()
}

#[test]
fn keygen_relations_and_encoding() {
    let pp = small();
    let keys = keygen(&pp, &mut rng(2)).unwrap();
    let a_r = keys.gpk.cert_vk.a.mul_int_matrix(keys.gsk.cert_sk.trapdoor.matrix()).unwrap();
    assert_eq!(a_r.add(&keys.gpk.cert_vk.a_prime).unwrap(), ZqMatrix::zero(pp.q, pp.n, pp.m_2));
    let s = keys.osk.ibe.trapdoor.matrix();
    let g = gadget_matrix(pp.n, pp.q_prime, s.cols).unwrap();
    assert_eq!(keys.gpk.b.mul_int_matrix(&stack_with_identity(s)).unwrap(), g);
    assert_eq!(keys.registry.counter(), 0);
    assert_eq!(GroupPublicKey::from_bytes(&keys.gpk.to_bytes()).unwrap(), keys.gpk);
    assert_eq!(ManagerKey::from_bytes(&keys.gsk.to_bytes()).unwrap(), keys.gsk);
    assert_eq!(OpenerKey::from_bytes(&keys.osk.to_bytes()).unwrap(), keys.osk);
    assert_eq!(keygen(&pp, &mut rng(2)).unwrap().gpk, keys.gpk);
}

#[test]
fn setup_rejects_malformed_group_sizes() {
    assert!(setup(4, 1).is_ok());
    assert!(setup(4, 6).is_err());
    assert!(setup(4, 0).is_err());
}

#[test]
fn join_flow_counters_and_rejections() {
    let pp = small();
    let mut r = rng(3);
    let mut keys = keygen(&pp, &mut r).unwrap();
    let (_, mut user_sk) = usersig_keygen(&mut r);
    let (req, pending) = join_user_request(&keys.gpk, &mut user_sk, &mut r).unwrap();
    assert!(pending.e.inf_norm() <= pp.b_lwe);
    let y = keys.gpk.b.transpose().mul_vec(&pending.x).unwrap().add(&ZqVector::from_i64(pp.q_prime, &pending.e.0)).unwrap();
    assert_eq!(y, pending.y);
    assert_eq!(bin_decompose(&y), req.y_bits);

    let resp = join_gm_process(&keys.gsk, &keys.gpk, &mut keys.registry, &req, &mut r).unwrap();
    assert_eq!(resp.cert_sig.id, 1);
    assert!(tagsig_verify(&keys.gpk.cert_vk, &resp.cert_sig, &req.y_bits, &pp));
    let dup = join_gm_process(&keys.gsk, &keys.gpk, &mut keys.registry, &req, &mut r);
    assert!(matches!(dup, Err(Error::Rejected(_))));

    let mut tampered = resp.clone();
    tampered.cert_sig.v1.0[0] += 1;
    assert!(matches!(join_user_finalize(&keys.gpk, &pending, &tampered), Err(Error::Rejected(_))));
    let (id, _, cert) = join_user_finalize(&keys.gpk, &pending, &resp).unwrap();
    assert_eq!((id, cert.id), (1, 1));

    let (req2, _) = join_user_request(&keys.gpk, &mut user_sk, &mut r).unwrap();
    assert_ne!(req2.y_bits, req.y_bits);
    let mut forged = req2.clone();
    forged.user_sig = req.user_sig.clone();
    assert!(matches!(join_gm_process(&keys.gsk, &keys.gpk, &mut keys.registry, &forged, &mut r), Err(Error::Rejected(_))));
    assert_eq!(keys.registry.counter(), 1);
    for _ in 1..pp.group_size {
        join(&mut keys, &mut r).unwrap();
    }
    let full = join(&mut keys, &mut r);
    assert!(matches!(full, Err(Error::Registry(_))), "{full:?}");
    let ids: Vec<u64> = keys.registry.entries().iter().map(|e| e.id).collect();
    assert_eq!(ids, (1..=pp.group_size).collect::<Vec<_>>());
}

#[test]
fn honest_signatures_verify_open_and_trace() {
    let g = group();
    let gpk = &g.keys.gpk;
    for (i, ((id, _, _), (msg, s))) in g.members.iter().zip(&g.sigs).enumerate() {
        assert!(verify(gpk, msg, s));
        assert_eq!(open(gpk, &g.keys.osk, msg, s), Some(*id));
        assert_eq!(audit_opened_id(&g.keys.registry, *id), AuditFinding::Registered(*id));
        for (j, (_, other, _)) in g.members.iter().enumerate() {
            let td = TracingTrapdoor { x: other.trapdoor_vector(gpk).unwrap() };
            assert_eq!(trace(gpk, &td, s), i == j);
        }
    }
    let zero = TracingTrapdoor { x: ZqVector::zero(gpk.pp.q_prime, gpk.pp.n) };
    assert!(g.sigs.iter().all(|(_, s)| !trace(gpk, &zero, s)));
    assert_eq!(audit_opened_id(&g.keys.registry, 7), AuditFinding::Unregistered(7));
}

#[test]
fn tampering_breaks_verification() {
    let g = group();
    let gpk = &g.keys.gpk;
    let (msg, s) = &g.sigs[0];
    assert!(!verify(gpk, b"another message", s));
    let mut t = s.clone();
    t.t.set(0, gpk.pp.q_prime.add(t.t.get(0), 1));
    assert!(!verify(gpk, msg, &t));
    assert_eq!(open(gpk, &g.keys.osk, msg, &t), None);
    let mut swapped = s.clone();
    swapped.c = g.sigs[1].1.c.clone();
    assert!(!verify(gpk, msg, &swapped));
    let mut rho = s.clone();
    rho.rho[0] ^= 1;
    assert!(!verify(gpk, msg, &rho));
}

#[test]
fn signing_is_randomized_and_checks_its_witness() {
    let g = group();
    let gpk = &g.keys.gpk;
    let (_, usk, cert) = &g.members[0];
    let mut r = rng(4);
    let a = sign(gpk, usk, cert, b"same", &mut r).unwrap();
    let b = sign(gpk, usk, cert, b"same", &mut r).unwrap();
    assert_ne!(a.to_bytes(), b.to_bytes());
    let (_, other_usk, _) = &g.members[1];
    assert!(matches!(sign(gpk, other_usk, cert, b"m", &mut r), Err(Error::Witness(_))));
    let mut forged = cert.clone();
    forged.id = 2;
    assert!(matches!(sign(gpk, usk, &forged, b"m", &mut r), Err(Error::Witness(_))));
}

#[test]
fn reveal_recovers_trapdoors() {
    let g = group();
    let (gpk, osk, reg) = (&g.keys.gpk, &g.keys.osk, &g.keys.registry);
    for (id, usk, _) in &g.members {
        let td = reveal(gpk, osk, reg, *id).unwrap().unwrap();
        assert_eq!(td.x, usk.trapdoor_vector(gpk).unwrap());
        let (_, s) = &g.sigs[*id as usize - 1];
        assert!(trace(gpk, &td, s));
    }
    assert_eq!(reveal(gpk, osk, reg, 0).unwrap(), None);
    assert_eq!(reveal(gpk, osk, reg, 99).unwrap(), None);

    let solver = osk.reveal_solver(gpk).unwrap();
    let y = &reg.get(1).unwrap().cert.y;
    let (e, _) = solver.decompose_sample(gpk, y).unwrap().unwrap();
    let mut bumped = y.clone();
    bumped.set(0, gpk.pp.q_prime.add(y.get(0), 1));
    match solver.decompose_sample(gpk, &bumped).unwrap() {
        None => {}
        Some((e2, _)) => assert_eq!(e2[0], e[0] + 1, "the shift shows up in the recovered noise"),
    }
    let mut far = y.clone();
    far.set(0, gpk.pp.q_prime.add(y.get(0), 2 * gpk.pp.b_lwe + 1));
    assert!(solver.decompose_sample(gpk, &far).unwrap().is_none());
}

#[test]
fn claims_bind_signer_signature_and_message() {
    let g = group();
    let gpk = &g.keys.gpk;
    let mut r = rng(5);
    let (msg, s) = &g.sigs[0];
    let (_, usk, _) = &g.members[0];
    let proof = claim(gpk, usk, msg, s, &mut r).unwrap().unwrap();
    assert!(claim_verify(gpk, msg, s, &proof));
    assert!(!claim_verify(gpk, b"other", s, &proof));
    let (msg1, s1) = &g.sigs[1];
    assert!(!claim_verify(gpk, msg1, s1, &proof));
    let (_, other, _) = &g.members[1];
    assert!(claim(gpk, other, msg, s, &mut r).unwrap().is_none());
    let mut t = s.clone();
    t.t.set(2, gpk.pp.q_prime.add(t.t.get(2), gpk.pp.q_prime.value() / 2));
    assert!(claim(gpk, usk, msg, &t, &mut r).unwrap().is_none());

    let bytes = proof.to_bytes();
    assert_eq!(ClaimProof::from_bytes_for(&bytes, gpk).unwrap(), proof);
    let mut bad = bytes.clone();
    let at = bytes.len() - 5;
    bad[at] ^= 0x10;
    let rejected = ClaimProof::from_bytes_for(&bad, gpk).map(|p| !claim_verify(gpk, msg, s, &p)).unwrap_or(true);
    assert!(rejected);
}

#[test]
fn artifacts_roundtrip_through_files() {
    let g = group();
    let gpk = &g.keys.gpk;
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let (_, usk, cert) = &g.members[0];
    let (_, s) = &g.sigs[0];
    write_artifact(&p("gpk"), gpk).unwrap();
    write_artifact(&p("reg"), &g.keys.registry).unwrap();
    write_artifact(&p("usk"), usk).unwrap();
    write_artifact(&p("cert"), cert).unwrap();
    write_artifact(&p("sig"), s).unwrap();
    assert_eq!(GroupPublicKey::from_bytes(&read_artifact(&p("gpk")).unwrap()).unwrap(), *gpk);
    assert_eq!(Registry::from_bytes(&read_artifact(&p("reg")).unwrap()).unwrap(), g.keys.registry);
    assert_eq!(UserSecret::from_bytes(&read_artifact(&p("usk")).unwrap()).unwrap(), *usk);
    assert_eq!(Certificate::from_bytes(&read_artifact(&p("cert")).unwrap()).unwrap(), *cert);
    let body = read_artifact(&p("sig")).unwrap();
    assert_eq!(body, s.to_bytes());
    assert_eq!(GroupSignature::from_bytes_for(&body, gpk).unwrap(), *s);
    let raw = std::fs::read(p("sig")).unwrap();
    std::fs::write(p("cut"), &raw[..raw.len() - 1]).unwrap();
    assert!(matches!(read_artifact(&p("cut")), Err(Error::Integrity(_))));
}

#[test]
fn harness_script_reports_no_violations() {
    let mut h = HonestParties::new(&small(), 6).unwrap();
    let script = [
        Step::Join,
        Step::Join,
        Step::Sign { member: 0, msg: b"a".to_vec() },
        Step::Join,
        Step::Sign { member: 2, msg: b"b".to_vec() },
        Step::Reveal { member: 2 },
        Step::Claim { signature: 0 },
        Step::Open { signature: 1 },
        Step::Reveal { member: 0 },
    ];
    h.run(&script).unwrap();
    assert!(h.violations().is_empty(), "{:?}", h.violations());
    assert_eq!(h.signature_count(), 2);
}

#[test]
fn user_signing_keys_persist_their_counter() {
    let (_, mut sk) = usersig_keygen(&mut rng(7));
    let g = group();
    join_user_request(&g.keys.gpk, &mut sk, &mut rng(8)).unwrap();
    let back = UserSigningKey::from_bytes(&sk.to_bytes()).unwrap();
    assert_eq!(back.remaining(), sk.remaining());
}
