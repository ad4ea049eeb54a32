//! Drive the command-line suites from code and read the JSON reports.

use gke_lab::cli::dispatch;

fn main() {
    for args in [&["brackets"][..], &["verify-solutions", "--case", "II"], &["brackets", "--inject-fault", "corrupt-brackets"]] {
        let mut argv = vec!["gke-lab", "--format", "json"];
        argv.extend_from_slice(args);
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = dispatch(argv, &mut out, &mut err);
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        let cases = v["cases"].as_array().unwrap();
        let passed = cases.iter().filter(|c| c["pass"] == true).count();
        println!("{args:?}: exit {code}, {passed}/{} cases pass", cases.len());
    }
}
