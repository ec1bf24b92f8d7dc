//! Evaluates the largest approximation pair that fits the default size
//! limit: the tower index 19 pair has integers just under 10^7 bits.

use tmcf::approx::Engine;

fn main() {
    let start = std::time::Instant::now();
    let engine = Engine::new();
    let pair = engine.tilde_pair(19, 9, 2).expect("within the size limit");
    println!("q_int bits: {}", pair.q_int.bits());
    println!("p_int bits: {}", pair.p_int.bits());
    println!("elapsed: {:?}", start.elapsed());
}
