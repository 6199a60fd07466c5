use urysohn::fraisse::*;
use urysohn::sets::DistanceSet;
use urysohn::rat::int;

fn main() {
    let r = DistanceSet::parse("{0,1,2}").unwrap();
    let vals = [int(1), int(2)];
    // Chunked at 100k, like the acceptance criterion.
    let mut st = BuildState::new(&r, BuildOptions { seed: 1, log_skips: false, ..Default::default() }).unwrap();
    st.run(100_000).unwrap();
    let rep = st.audit_extension(3, &vals);
    println!("chunk100k: stage={} n={} pending={} pass={}", st.stage(), st.space().len(), rep.pending_total, rep.pass());
    // Chunked at 25k.
    let mut st = BuildState::new(&r, BuildOptions { seed: 1, log_skips: false, ..Default::default() }).unwrap();
    for _ in 0..4 {
        st.run(25_000).unwrap();
        let rep = st.audit_extension(3, &vals);
        println!("chunk25k: stage={} n={} pending={} pass={}", st.stage(), st.space().len(), rep.pending_total, rep.pass());
    }
}
