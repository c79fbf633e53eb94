#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    std::string out_path = "cli_stdout_" + std::to_string(counter) + ".txt";
    std::string err_path = "cli_stderr_" + std::to_string(counter) + ".txt";
    ++counter;
    std::string cmd = std::string(SRL_BIN) + " " + args + " >" + out_path + " 2>" + err_path;
    int raw = std::system(cmd.c_str());
    RunResult r;
    r.status = raw < 0 ? raw : WEXITSTATUS(raw);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return r;
}

struct Workspace {
    fs::path dir;
    Workspace() : dir("cli_workspace") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

const char* kTinyDims =
    " --set d_w=12 --set d_dep=6 --set d_pos=6 --set d_h=10 --set layers=1"
    " --set d_rho0=8 --set d_rho1=6 --set d_pi=6 --set d_g=8 --set d_r=8"
    " --set dropout=0 --set rdropout=0 --set lr=3e-3 --set batch=8 --set patience=1000";

}  // namespace

TEST_CASE("help lists the subcommands and unknown flags fail fast") {
    RunResult help = run_cli("--help");
    CHECK(help.status == 0);
    for (const char* name :
         {"gen-synth", "train-baseline", "train-refiner", "predict", "evaluate", "analyze"})
        CHECK(help.out.find(name) != std::string::npos);

    RunResult sub_help = run_cli("predict --help");
    CHECK(sub_help.status == 0);
    CHECK(sub_help.out.find("--iterations") != std::string::npos);
    CHECK(sub_help.out.find("--mode") != std::string::npos);

    RunResult bad = run_cli("gen-synth --no-such-flag --out x");
    CHECK(bad.status != 0);

    RunResult bad_sub = run_cli("transmogrify");
    CHECK(bad_sub.status != 0);
}

TEST_CASE("module errors come back as one-line diagnostics") {
    RunResult r = run_cli("evaluate missing_a.conll missing_b.conll");
    CHECK(r.status == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
    CHECK(r.out.empty());
}

TEST_CASE("full workflow: generate, train, refine, predict, evaluate, analyze") {
    Workspace ws;
    std::string data = ws.path("data");

    RunResult gen = run_cli("gen-synth --seed 7 --sentences 40 --split 28,6,6 --out " + data);
    REQUIRE(gen.status == 0);
    CHECK(fs::exists(data + "/synth.conll"));
    CHECK(fs::exists(data + "/train.conll"));
    CHECK(fs::exists(data + "/dev.conll"));
    CHECK(fs::exists(data + "/test.conll"));
    nlohmann::json manifest = nlohmann::json::parse(slurp(data + "/manifest.json"));
    CHECK(manifest["sentences"] == 40);
    CHECK(manifest["files"]["train"] == "train.conll");

    // identical seeds give identical corpora
    std::string data2 = ws.path("data2");
    RunResult gen2 = run_cli("gen-synth --seed 7 --sentences 40 --split 28,6,6 --out " + data2);
    REQUIRE(gen2.status == 0);
    CHECK(slurp(data + "/synth.conll") == slurp(data2 + "/synth.conll"));

    std::string model_dir = ws.path("model");
    RunResult tb = run_cli("train-baseline --train " + data + "/train.conll --dev " + data +
                           "/dev.conll --out " + model_dir + kTinyDims +
                           " --set epochs_baseline=3 --seed 5");
    REQUIRE(tb.status == 0);
    CHECK(fs::exists(model_dir + "/vocab.txt"));
    CHECK(fs::exists(model_dir + "/baseline.ckpt"));
    CHECK(tb.err.find("split dev loss") != std::string::npos);
    CHECK(tb.out.empty());  // data to files, logs to stderr

    RunResult tr = run_cli("train-refiner --train " + data + "/train.conll --dev " + data +
                           "/dev.conll --baseline " + model_dir + "/baseline.ckpt --vocab " +
                           model_dir + "/vocab.txt --out " + model_dir + kTinyDims +
                           " --set epochs_refiner=2 --iterations 1 --mode structured --seed 5");
    REQUIRE(tr.status == 0);
    CHECK(fs::exists(model_dir + "/refiner.ckpt"));
    CHECK(tr.err.find("gumbel role flip fraction") != std::string::npos);

    std::string base_pred = ws.path("base.conll");
    RunResult pb = run_cli("predict " + data + "/dev.conll --model " + model_dir +
                           "/baseline.ckpt --vocab " + model_dir + "/vocab.txt" +
                           " --mode baseline --out " + base_pred);
    REQUIRE(pb.status == 0);

    // zero refinement steps reproduce baseline decoding bitwise
    std::string zero_pred = ws.path("zero.conll");
    RunResult pz = run_cli("predict " + data + "/dev.conll --model " + model_dir +
                           "/baseline.ckpt --vocab " + model_dir + "/vocab.txt --refiner " +
                           model_dir + "/refiner.ckpt --iterations 0 --out " + zero_pred);
    REQUIRE(pz.status == 0);
    CHECK(slurp(zero_pred) == slurp(base_pred));

    std::string refined_pred = ws.path("refined.conll");
    RunResult pr = run_cli("predict " + data + "/dev.conll --model " + model_dir +
                           "/baseline.ckpt --vocab " + model_dir + "/vocab.txt --refiner " +
                           model_dir + "/refiner.ckpt --iterations 1 --mode structured" +
                           " --out " + refined_pred);
    REQUIRE(pr.status == 0);

    // gold against itself is a perfect score
    std::string report = ws.path("report.json");
    RunResult ev = run_cli("evaluate " + data + "/dev.conll " + data + "/dev.conll --json " +
                           report);
    REQUIRE(ev.status == 0);
    std::istringstream lines(slurp(report));
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        nlohmann::json j = nlohmann::json::parse(line);
        if (j["group"] == "labeled") {
            CHECK(j["f1"] == doctest::Approx(1.0));
            found = true;
        }
    }
    CHECK(found);

    std::string report_txt = ws.path("report.txt");
    RunResult ev2 = run_cli("evaluate " + data + "/dev.conll " + refined_pred + " --out " +
                            report_txt);
    REQUIRE(ev2.status == 0);
    CHECK(fs::exists(report_txt));
    CHECK(ev2.err.find("F1") != std::string::npos);

    std::string analysis = ws.path("analysis");
    RunResult an = run_cli("analyze " + data + "/dev.conll " + base_pred + " " + refined_pred +
                           " --out " + analysis);
    REQUIRE(an.status == 0);
    CHECK(fs::exists(analysis + "/analysis.txt"));
    CHECK(fs::exists(analysis + "/analysis.json"));
    CHECK(fs::exists(analysis + "/confusion.csv"));
    CHECK(fs::exists(analysis + "/correction.csv"));

    // a refiner refuses to decode against the wrong baseline checkpoint
    std::string model_dir2 = ws.path("model2");
    RunResult tb2 = run_cli("train-baseline --train " + data + "/train.conll --dev " + data +
                            "/dev.conll --out " + model_dir2 + kTinyDims +
                            " --set epochs_baseline=1 --seed 6");
    REQUIRE(tb2.status == 0);
    RunResult mismatch = run_cli("predict " + data + "/dev.conll --model " + model_dir2 +
                                 "/baseline.ckpt --vocab " + model_dir2 + "/vocab.txt" +
                                 " --refiner " + model_dir + "/refiner.ckpt --iterations 1" +
                                 " --out " + ws.path("never.conll"));
    CHECK(mismatch.status == 1);
    CHECK(mismatch.err.find("error: ") != std::string::npos);
}
