use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use santalo_core::io::BodyFile;

fn santalo(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_santalo"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

#[test]
fn santalo_on_random_polygons_passes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "dim = 2\nseed = 3\nchecks = [\"santalo\"]\noutput = \"out\"\n[corpus]\ncount = 10\n",
    );
    let o = santalo(&["verify", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("santalo: 10/10 passed"));
    let csv = fs::read_to_string(dir.path().join("out/reports.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "inequality_id,n,body_id,measure_id,lhs,lhs_err,rhs,rhs_err,margin,slack,passed,seed"
    );
    assert_eq!(lines.count(), 10);
}

#[test]
fn reports_are_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "cfg.toml",
        "dim = 2\nseed = 9\nchecks = [\"santalo\", \"main\"]\n[corpus]\ncount = 4\n[[measures]]\nkind = \"gaussian\"\n",
    );
    let a = santalo(
        &["verify", "--config", &cfg, "--out", "a", "--jobs", "1"],
        dir.path(),
    );
    let b = santalo(
        &["verify", "--config", &cfg, "--out", "b", "--jobs", "3"],
        dir.path(),
    );
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    let ra = fs::read(dir.path().join("a/reports.csv")).unwrap();
    let rb = fs::read(dir.path().join("b/reports.csv")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn bad_configs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "dim9.toml",
        "dim = 9\nchecks = [\"santalo\"]\n[corpus]\ncount = 2\n",
    );
    let o = santalo(&["verify", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));

    let cfg = write(
        dir.path(),
        "empty.toml",
        "dim = 2\nchecks = [\"santalo\"]\n",
    );
    let o = santalo(&["verify", "--config", &cfg], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("empty corpus"), "{}", stderr(&o));

    let o = santalo(&["verify", "--config", "missing.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn symmetrizing_a_sheared_cube_gives_the_cube() {
    let dir = tempfile::tempdir().unwrap();
    let cube = santalo_core::HPolytope::cube(2, 1.0).unwrap();
    // Sheared along e_2, which the full pipeline symmetrizes.
    let body = write(
        dir.path(),
        "sheared.toml",
        "kind = \"hpolytope\"\ndim = 2\nnormals = [[1, 0], [-1, 0], [-1, 1], [1, -1]]\n",
    );
    let o = santalo(
        &["symmetrize", &body, "--axis", "all", "--out", "sym.toml"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("volume 4.0 -> 4.0"), "{}", stdout(&o));
    let out = BodyFile::read(&dir.path().join("sym.toml"))
        .unwrap()
        .to_hpolytope()
        .unwrap()
        .unwrap();
    assert!(out.approx_eq(&cube, 1e-12));

    // Sheared along e_1 needs the first axis.
    let body = write(
        dir.path(),
        "sheared_x.toml",
        "kind = \"hpolytope\"\ndim = 2\nnormals = [[0, 1], [0, -1], [1, -1], [-1, 1]]\n",
    );
    let o = santalo(
        &["symmetrize", &body, "--axis", "1", "--out", "sym_x.toml"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = BodyFile::read(&dir.path().join("sym_x.toml"))
        .unwrap()
        .to_hpolytope()
        .unwrap()
        .unwrap();
    assert!(out.approx_eq(&cube, 1e-12));

    let o = santalo(&["symmetrize", &body, "--axis", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn products_and_volumes() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write(
        dir.path(),
        "cube.toml",
        "kind = \"hpolytope\"\ndim = 2\nnormals = [[1, 0], [-1, 0], [0, 1], [0, -1]]\n",
    );
    let o = santalo(&["product", &cube], dir.path());
    assert_eq!(stdout(&o).trim(), "P = 8.0 ± 0e0");

    let ball = write(
        dir.path(),
        "ball.toml",
        "kind = \"ball\"\ndim = 2\nradius = 1.0\n",
    );
    let o = santalo(&["product", &ball], dir.path());
    let line = stdout(&o);
    let value: f64 = line
        .trim()
        .strip_prefix("P = ")
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - std::f64::consts::PI.powi(2)).abs() < 1e-12);

    let o = santalo(&["product", &cube, "--measure", "gaussian:1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let value: f64 = stdout(&o)
        .trim()
        .strip_prefix("P = ")
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    // Gaussian mass of the square times that of the diamond; both below 1.
    assert!(value > 0.0 && value < 1.0);

    let diamond = write(
        dir.path(),
        "diamond.toml",
        "kind = \"vpolytope\"\ndim = 3\nvertices = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]\n",
    );
    let o = santalo(&["volume", &diamond], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let value: f64 = stdout(&o).split(' ').next().unwrap().parse().unwrap();
    assert!((value - 4.0 / 3.0).abs() < 1e-14);
}

#[test]
fn polar_of_the_cube_is_the_diamond() {
    let dir = tempfile::tempdir().unwrap();
    let cube = write(
        dir.path(),
        "cube.toml",
        "kind = \"hpolytope\"\ndim = 2\nnormals = [[1, 0], [-1, 0], [0, 1], [0, -1]]\n",
    );
    let o = santalo(&["polar", &cube, "--out", "polar.toml"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p = BodyFile::read(&dir.path().join("polar.toml"))
        .unwrap()
        .to_hpolytope()
        .unwrap()
        .unwrap();
    assert!(p.approx_eq(
        &santalo_core::HPolytope::cross_polytope(2, 1.0).unwrap(),
        1e-12
    ));
}

#[test]
fn gaussian_sweep_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sweep.toml",
        "dim = 2\nchecks = []\n[sweep]\nmeasure = { kind = \"gaussian\" }\nradii = [0.5, 1.0, 2.0]\nt_grid = [0.0]\n",
    );
    let o = santalo(&["sweep", "--config", &cfg, "--out", "s"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("s/sweep.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 4);
    let mass = |r: f64| -(-r * r / 2.0).exp_m1();
    for row in &rows[..3] {
        let r: f64 = row[1].parse().unwrap();
        let v: f64 = row[2].parse().unwrap();
        let want = mass(r) * mass(1.0 / r);
        assert!((v - want).abs() < 1e-12, "r={r}: {v} vs {want}");
    }
    let v: f64 = rows[3][2].parse().unwrap();
    assert!((v - mass(1.0).ln()).abs() < 1e-12);
}

#[test]
fn generated_bodies_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = santalo(
        &[
            "generate", "--dim", "3", "--count", "3", "--seed", "5", "--out", "bodies",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for entry in fs::read_dir(dir.path().join("bodies")).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let body = BodyFile::read(&path).unwrap();
        assert_eq!(body.to_toml(), text);
        assert!(body.to_hpolytope().unwrap().unwrap().is_symmetric());
    }
}
