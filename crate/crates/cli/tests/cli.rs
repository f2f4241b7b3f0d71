use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seldkit::foa::wav::{write_foa, write_mono, SampleFormat};
use seldkit::foa::{encode_foa_anechoic, MonoClip};
use seldkit::labels::metadata::write_metadata;
use seldkit::labels::tensor_file::{TensorFile, ACCDOA_MAGIC, VISUAL_MAGIC};
use seldkit::{Doa, SeldEvent};

fn seldkit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seldkit"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SELDKIT_JOBS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A 2 s clip with one source at (60, -20) labelled in every frame.
fn write_clip(dir: &Path, labelled: Doa<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let m = MonoClip::new((0..48_000).map(|_| rng.random_range(-0.5..0.5)).collect(), 24_000).unwrap();
    let clip = encode_foa_anechoic(&m, &Doa::new(60.0, -20.0).unwrap()).unwrap();
    write_foa(&dir.join("a.wav"), &clip, SampleFormat::Pcm16).unwrap();
    let events: Vec<_> = (0..20).map(|f| SeldEvent::new(f, 4, 0, labelled).unwrap()).collect();
    write_metadata(&events, &dir.join("a.csv")).unwrap();
}

#[test]
fn unknown_flag_is_a_usage_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    write_clip(tmp.path(), Doa::new(60.0, -20.0).unwrap());
    let o = seldkit(&["augment", "--audio", "a.wav", "--meta", "a.csv", "--out", "out", "--bogus"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("out").exists());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--bogus"));
}

#[test]
fn help_documents_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let o = seldkit(&["--help"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for word in ["augment", "synth", "encode-accdoa", "encode-visual", "eval", "validate-doa", "frame,class,source"] {
        assert!(text.contains(word), "help lacks {word}");
    }
}

#[test]
fn runtime_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = seldkit(&["validate-doa", "--audio", "missing.wav", "--meta", "missing.csv"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn augment_writes_eight_suffixed_triples() {
    let tmp = tempfile::tempdir().unwrap();
    write_clip(tmp.path(), Doa::new(60.0, -20.0).unwrap());
    let o = seldkit(&["augment", "--audio", "a.wav", "--meta", "a.csv", "--out", "out"], tmp.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for i in 0..8 {
        assert!(tmp.path().join(format!("out/foa/a_t{i}.wav")).is_file());
        assert!(tmp.path().join(format!("out/metadata/a_t{i}.csv")).is_file());
    }
    let t3 = fs::read_to_string(tmp.path().join("out/metadata/a_t3.csv")).unwrap();
    assert!(t3.starts_with("0,4,0,-30,20\n"), "{t3}");
    // every augmented clip still agrees with its labels
    for i in 0..8 {
        let wav = format!("out/foa/a_t{i}.wav");
        let csv = format!("out/metadata/a_t{i}.csv");
        let o = seldkit(&["validate-doa", "--audio", &wav, "--meta", &csv], tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
}

#[test]
fn augment_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    write_clip(tmp.path(), Doa::new(60.0, -20.0).unwrap());
    for out in ["o1", "o2"] {
        let o = seldkit(&["augment", "--audio", "a.wav", "--meta", "a.csv", "--out", out], tmp.path());
        assert!(o.status.success());
    }
    for i in 0..8 {
        let a = fs::read(tmp.path().join(format!("o1/foa/a_t{i}.wav"))).unwrap();
        let b = fs::read(tmp.path().join(format!("o2/foa/a_t{i}.wav"))).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn validate_doa_fails_on_wrong_labels() {
    let tmp = tempfile::tempdir().unwrap();
    write_clip(tmp.path(), Doa::new(-100.0, 0.0).unwrap());
    let o = seldkit(&["validate-doa", "--audio", "a.wav", "--meta", "a.csv", "--tolerance", "5"], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn eval_self_and_against_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    fs::create_dir_all(dir.join("ref")).unwrap();
    fs::create_dir_all(dir.join("pred")).unwrap();
    fs::create_dir_all(dir.join("none")).unwrap();
    let events: Vec<_> = (0..30)
        .map(|f| SeldEvent::new(f, (f % 3) as u8, 0, Doa::new(10.0 * f as f64 - 150.0, 5.0).unwrap()).unwrap())
        .collect();
    write_metadata(&events, &dir.join("ref/x.csv")).unwrap();
    write_metadata(&events, &dir.join("pred/x.csv")).unwrap();
    let o = seldkit(&["eval", "--ref", "ref", "--pred", "pred", "--csv", "scores.csv", "--per-class"], dir);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.join("scores.csv")).unwrap();
    assert_eq!(csv, "file,er20,f20,le,lr\nx,0,1,0,1\nALL,0,1,0,1\n");
    assert!(stdout(&o).contains("class"));

    let o = seldkit(&["eval", "--ref", "ref", "--pred", "none", "--average", "micro"], dir);
    assert!(o.status.success());
    let last = stdout(&o).lines().nth(2).unwrap().to_string();
    assert!(last.starts_with("ALL") && last.contains("undefined"), "{last}");
}

#[test]
fn encoders_write_tensor_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_clip(dir, Doa::new(60.0, -20.0).unwrap());
    let o = seldkit(&["encode-accdoa", "--meta", "a.csv", "--out", "a.bin"], dir);
    assert!(o.status.success());
    let t = TensorFile::read_expect(&dir.join("a.bin"), ACCDOA_MAGIC).unwrap();
    assert_eq!(t.dims, [20, 3, 13, 3]);

    fs::write(dir.join("boxes.csv"), "0,0.5,0.5,0.2,0.2\n3,0.1,0.9,0.05,0.1\n").unwrap();
    let o = seldkit(&["encode-visual", "--boxes", "boxes.csv", "--out", "v.bin", "--frames", "5"], dir);
    assert!(o.status.success());
    let t = TensorFile::read_expect(&dir.join("v.bin"), VISUAL_MAGIC).unwrap();
    assert_eq!(t.dims, [5, 2, 6, 37]);
}

fn write_assets(dir: &Path) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (i, secs) in [1.0, 2.5, 1.5].iter().enumerate() {
        let n = (secs * 24_000.0) as usize;
        let m = MonoClip::new((0..n).map(|_| rng.random_range(-0.5..0.5)).collect(), 24_000).unwrap();
        write_mono(&dir.join(format!("s{i}.wav")), &m, SampleFormat::Pcm16).unwrap();
    }
    fs::write(dir.join("assets.csv"), "s0.wav,0\ns1.wav,5\ns2.wav,12\n").unwrap();
}

#[test]
fn synth_is_seeded_and_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_assets(dir);
    let args = |out: &'static str| {
        vec![
            "synth", "--count", "3", "--duration", "6", "--seed", "42", "--assets", "assets.csv", "--rirs",
            "anechoic", "--out", out, "--width", "64", "--fps", "10",
        ]
    };
    assert!(seldkit(&args("s1"), dir).status.success());
    let o = seldkit(&[args("s2"), vec!["--jobs", "2"]].concat(), dir);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    for stem in ["scene_0000", "scene_0001", "scene_0002"] {
        for rel in [format!("foa/{stem}.wav"), format!("metadata/{stem}.csv"), format!("video/{stem}/000059.png")] {
            let a = fs::read(dir.join("s1").join(&rel)).unwrap();
            let b = fs::read(dir.join("s2").join(&rel)).unwrap();
            assert_eq!(a, b, "{rel}");
        }
        assert!(!dir.join(format!("s1/video/{stem}/000060.png")).exists());
        let o = seldkit(
            &["validate-doa", "--audio", &format!("s1/foa/{stem}.wav"), "--meta", &format!("s1/metadata/{stem}.csv")],
            dir,
        );
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let a = fs::read(dir.join("s1/metadata/scene_0000.csv")).unwrap();
    let b = fs::read(dir.join("s1/metadata/scene_0001.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn synth_without_video() {
    let tmp = tempfile::tempdir().unwrap();
    write_assets(tmp.path());
    let o = seldkit(
        &["synth", "--count", "1", "--duration", "3", "--assets", "assets.csv", "--out", "s", "--no-video"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("s/foa/scene_0000.wav").is_file());
    assert!(!tmp.path().join("s/video").exists());
}
