//! gnuplot scripts for the CSV outputs. Each script reads its CSV by
//! relative path and writes a PNG next to it: `gnuplot characterize.gp`.

const PREAMBLE: &str = "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\nset grid\n";

fn header(png: &str, size: &str) -> String {
    format!("{PREAMBLE}set terminal pngcairo size {size}\nset output '{png}'\n")
}

/// a, b and σ against stator speed, coloured by flux, direct as lines and
/// simulated as points.
pub fn characterize(csv: &str) -> String {
    let mut s = header("characterize.png", "800,900");
    s.push_str("set multiplot layout 3,1\nset xlabel 'omega_s (rad/s)'\nset cblabel 'flux (Wb)'\n");
    for (col_direct, col_sim, label) in [(4, 7, "a (1/H)"), (5, 8, "b (1/H)"), (6, 9, "sigma (rad)")] {
        s.push_str(&format!(
            "set ylabel '{label}'\nplot '{csv}' using 2:{col_direct}:1 with points pt 7 ps 0.4 palette title 'direct', \\\n     '' using 2:{col_sim}:1 with points pt 6 palette title 'simulated'\n"
        ));
    }
    s.push_str("unset multiplot\n");
    s
}

/// Condition numbers of Os and Os' against load torque on a log scale.
pub fn observability(csv: &str) -> String {
    let mut s = header("observability.png", "800,500");
    s.push_str(&format!(
        "set logscale y\nset xlabel 'load torque (N.m)'\nset ylabel 'condition number'\nset cblabel 'flux (%)'\nplot '{csv}' using 2:3:1 with points pt 7 ps 0.5 palette title 'Os', \\\n     '' using 2:4:1 with points pt 6 ps 0.5 palette title \"Os'\"\n"
    ));
    s
}

/// Extraction error against injection frequency, log-log.
pub fn convergence(csv: &str) -> String {
    let mut s = header("convergence.png", "700,500");
    s.push_str(&format!(
        "set logscale xy\nset xlabel 'injection frequency (Hz)'\nset ylabel 'relative error'\nplot '{csv}' using 1:2 with linespoints pt 7, \\\n     '' using 1:3 with linespoints pt 5\n"
    ));
    s
}

/// Stator current and its LF/HF parts against time.
pub fn trajectory(csv: &str) -> String {
    let mut s = header("trajectory.png", "900,700");
    s.push_str(&format!(
        "set multiplot layout 2,1\nset xlabel 't (s)'\nset ylabel 'current (A)'\nplot '{csv}' using 1:7 with lines, '' using 1:8 with lines, '' using 1:9 with lines, '' using 1:10 with lines\nset ylabel 'HF estimate (A/s)'\nplot '{csv}' using 1:11 with lines, '' using 1:12 with lines\nunset multiplot\n"
    ));
    s
}
