//! The C interface driven from Rust, plus a C program compiled against the header.

use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;
use tracesig_ffi::*;

fn last_error() -> String {
    let p = ts_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

struct Fixture {
    params: *mut TsParams,
    group: *mut TsGroup,
    members: Vec<*mut TsMember>,
}

impl Fixture {
    fn new(members: u64) -> Self {
        let mut params = ptr::null_mut();
        let mut group = ptr::null_mut();
        unsafe {
            assert_eq!(ts_setup(4, 3, &mut params), TsStatus::Ok);
            assert_eq!(ts_group_keygen(params, 1, &mut group), TsStatus::Ok);
        }
        let members = (0..members)
            .map(|i| {
                let mut m = ptr::null_mut();
                assert_eq!(unsafe { ts_group_join(group, 100 + i, &mut m) }, TsStatus::Ok, "{}", last_error());
                m
            })
            .collect();
        Self { params, group, members }
    }

    fn sign(&self, member: usize, msg: &[u8], seed: u64) -> *mut TsSignature {
        let mut sig = ptr::null_mut();
        let status = unsafe { ts_sign(self.group, self.members[member], msg.as_ptr(), msg.len(), seed, &mut sig) };
        assert_eq!(status, TsStatus::Ok);
        sig
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe {
            for m in self.members.drain(..) {
                ts_member_free(m);
            }
            ts_group_free(self.group);
            ts_params_free(self.params);
        }
    }
}

#[test]
fn lifecycle_through_handles() {
    let f = Fixture::new(2);
    unsafe {
        assert_eq!(ts_member_id(f.members[0]), 1);
        assert_eq!(ts_member_id(f.members[1]), 2);
        let mut size = 0;
        assert_eq!(ts_group_size(f.group, &mut size), TsStatus::Ok);
        assert_eq!(size, 2);

        let msg = b"over the C boundary";
        let sig = f.sign(0, msg, 9);
        let mut ok = false;
        assert_eq!(ts_verify(f.group, msg.as_ptr(), msg.len(), sig, &mut ok), TsStatus::Ok);
        assert!(ok);
        assert_eq!(ts_verify(f.group, b"x".as_ptr(), 1, sig, &mut ok), TsStatus::Ok);
        assert!(!ok);
        let mut id = 0;
        assert_eq!(ts_open(f.group, msg.as_ptr(), msg.len(), sig, &mut id), TsStatus::Ok);
        assert_eq!(id, 1);

        let (mut own, mut other) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ts_reveal(f.group, 1, &mut own), TsStatus::Ok);
        assert_eq!(ts_reveal(f.group, 2, &mut other), TsStatus::Ok);
        assert_eq!(ts_reveal(f.group, 7, &mut ptr::null_mut()), TsStatus::Rejected);
        assert_eq!(ts_trace(f.group, own, sig, &mut ok), TsStatus::Ok);
        assert!(ok);
        assert_eq!(ts_trace(f.group, other, sig, &mut ok), TsStatus::Ok);
        assert!(!ok);

        let mut claim = ptr::null_mut();
        assert_eq!(ts_claim(f.group, f.members[1], msg.as_ptr(), msg.len(), sig, 3, &mut claim), TsStatus::Rejected);
        assert_eq!(ts_claim(f.group, f.members[0], msg.as_ptr(), msg.len(), sig, 3, &mut claim), TsStatus::Ok);
        assert_eq!(ts_claim_verify(f.group, msg.as_ptr(), msg.len(), sig, claim, &mut ok), TsStatus::Ok);
        assert!(ok);

        let mut buf = TsBuffer { data: ptr::null_mut(), len: 0 };
        assert_eq!(ts_signature_encode(sig, &mut buf), TsStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(ts_signature_decode(f.group, buf.data, buf.len, &mut back), TsStatus::Ok);
        assert_eq!(ts_verify(f.group, msg.as_ptr(), msg.len(), back, &mut ok), TsStatus::Ok);
        assert!(ok);
        assert_eq!(ts_signature_decode(f.group, buf.data, buf.len - 1, &mut ptr::null_mut()), TsStatus::Malformed);
        assert!(!last_error().is_empty());

        ts_buffer_free(buf);
        ts_signature_free(back);
        ts_claim_free(claim);
        ts_trapdoor_free(own);
        ts_trapdoor_free(other);
        ts_signature_free(sig);
    }
}

#[test]
fn equal_seeds_give_equal_signatures() {
    let f = Fixture::new(1);
    let encode = |sig: *mut TsSignature| {
        let mut buf = TsBuffer { data: ptr::null_mut(), len: 0 };
        unsafe {
            assert_eq!(ts_signature_encode(sig, &mut buf), TsStatus::Ok);
            let bytes = std::slice::from_raw_parts(buf.data, buf.len).to_vec();
            ts_buffer_free(buf);
            ts_signature_free(sig);
            bytes
        }
    };
    let a = encode(f.sign(0, b"m", 5));
    let b = encode(f.sign(0, b"m", 5));
    let c = encode(f.sign(0, b"m", 6));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn null_and_invalid_arguments_are_reported() {
    unsafe {
        let mut params = ptr::null_mut();
        assert_eq!(ts_setup(4, 6, &mut params), TsStatus::InvalidParams);
        assert!(params.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(ts_setup(4, 3, ptr::null_mut()), TsStatus::NullPointer);
        assert_eq!(ts_group_keygen(ptr::null(), 0, &mut ptr::null_mut()), TsStatus::NullPointer);
        let mut ok = false;
        assert_eq!(ts_verify(ptr::null(), ptr::null(), 0, ptr::null(), &mut ok), TsStatus::NullPointer);
        assert_eq!(ts_member_id(ptr::null()), 0);
        ts_params_free(ptr::null_mut());
        ts_buffer_free(TsBuffer { data: ptr::null_mut(), len: 0 });
    }

    let mut f = Fixture::new(3);
    let mut extra = ptr::null_mut();
    assert_eq!(unsafe { ts_group_join(f.group, 50, &mut extra) }, TsStatus::GroupFull);
    f.members.truncate(3);
}

fn target_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links_from_c() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/tracesig.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["ts_setup", "ts_sign", "ts_verify", "ts_open", "ts_reveal", "ts_trace", "ts_claim_verify", "TS_STATUS_REJECTED"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    let Ok(cc) = which_cc() else {
        eprintln!("no C compiler found, header check only");
        return;
    };
    let lib = target_dir().join("libtracesig_ffi.a");
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let mut cmd = Command::new(cc);
    cmd.arg("-std=c99").arg("-Wall").arg("-Werror").arg("-I").arg(crate_dir.join("include")).arg(crate_dir.join("tests/smoke.c"));
    if !lib.exists() {
        let status = cmd.arg("-fsyntax-only").status().unwrap();
        assert!(status.success());
        return;
    }
    let status = cmd.arg(&lib).args(["-lpthread", "-ldl", "-lm", "-o"]).arg(&exe).status().unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "smoke=ok");
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok()).ok_or(())
}
