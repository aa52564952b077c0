#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "genbound/batching.hpp"
#include "genbound/generator.hpp"

using namespace genbound;

TEST_CASE("teacher-student inputs sit on the unit sphere with tanh targets") {
    GenConfig cfg;
    cfg.d0 = 12;
    cfg.teacher_width = 64;
    cfg.n_train = 200;
    cfg.n_test = 100;
    GeneratedData data = gen_teacher_student(cfg, 31);

    REQUIRE(data.train.n() == 200);
    REQUIRE(data.test.n() == 100);
    for (const Dataset* ds : {&data.train, &data.test}) {
        CHECK(ds->input_dim == 12);
        for (const Example& z : ds->examples) {
            double norm_sq = 0.0;
            for (double v : z.x) norm_sq += v * v;
            REQUIRE(std::fabs(norm_sq - 1.0) <= 1e-12);
            REQUIRE(z.y > -1.0);
            REQUIRE(z.y < 1.0);
        }
    }
}

TEST_CASE("generation is a pure function of the seed") {
    GenConfig cfg;
    cfg.d0 = 6;
    cfg.teacher_width = 32;
    cfg.n_train = 50;
    cfg.n_test = 20;
    GeneratedData a = gen_teacher_student(cfg, 77);
    GeneratedData b = gen_teacher_student(cfg, 77);
    GeneratedData c = gen_teacher_student(cfg, 78);

    for (std::size_t i = 0; i < a.train.n(); ++i) {
        REQUIRE(a.train.examples[i].x == b.train.examples[i].x);
        REQUIRE(a.train.examples[i].y == b.train.examples[i].y);
    }
    CHECK(a.test.examples[0].x != c.test.examples[0].x);
    // train and test come from separate substreams
    CHECK(a.train.examples[0].x != a.test.examples[0].x);
}

TEST_CASE("classification mode yields balanced quantile bins on the train split") {
    GenConfig cfg;
    cfg.task = TaskKind::classification;
    cfg.d0 = 10;
    cfg.teacher_width = 128;
    cfg.n_train = 2000;
    cfg.n_test = 400;
    cfg.classes = 4;
    GeneratedData data = gen_teacher_student(cfg, 5);

    REQUIRE(data.thresholds.size() == 3);
    REQUIRE(data.train.num_classes == 4);
    std::vector<std::size_t> counts(4, 0);
    for (const Example& z : data.train.examples) {
        REQUIRE(z.label >= 0);
        REQUIRE(z.label < 4);
        ++counts[static_cast<std::size_t>(z.label)];
    }
    for (std::size_t c = 0; c < 4; ++c) CHECK(counts[c] == 500);
    for (const Example& z : data.test.examples) {
        REQUIRE(z.label >= 0);
        REQUIRE(z.label < 4);
    }
}

TEST_CASE("label noise flips exactly round(eps n) uniformly chosen labels") {
    GenConfig cfg;
    cfg.task = TaskKind::classification;
    cfg.d0 = 8;
    cfg.teacher_width = 32;
    cfg.n_train = 500;
    cfg.n_test = 10;
    cfg.classes = 5;
    GeneratedData data = gen_teacher_student(cfg, 11);

    Dataset noisy = data.train;
    SeededStream stream(400);
    std::size_t count = inject_label_noise(noisy, 0.37, stream);
    CHECK(count == 185);  // round(0.37 * 500)

    std::size_t marked = 0;
    for (std::size_t i = 0; i < noisy.n(); ++i) {
        const Example& z = noisy.examples[i];
        REQUIRE(z.label >= 0);
        REQUIRE(z.label < 5);
        if (z.noisy) ++marked;
        if (!z.noisy) REQUIRE(z.label == data.train.examples[i].label);
    }
    CHECK(marked == 185);

    Dataset replay = data.train;
    SeededStream stream2(400);
    inject_label_noise(replay, 0.37, stream2);
    for (std::size_t i = 0; i < replay.n(); ++i)
        REQUIRE(replay.examples[i].label == noisy.examples[i].label);

    Dataset zero = data.train;
    SeededStream s3(1);
    CHECK(inject_label_noise(zero, 0.0, s3) == 0);

    Dataset regression;
    regression.task = TaskKind::regression;
    regression.examples.resize(3);
    CHECK_THROWS_AS(inject_label_noise(regression, 0.1, s3), std::invalid_argument);
    CHECK_THROWS_AS(inject_label_noise(zero, 1.5, s3), std::invalid_argument);
}

TEST_CASE("csv datasets round-trip and report malformed rows by line") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "genbound_csv_test";
    fs::create_directories(dir);

    GenConfig cfg;
    cfg.d0 = 5;
    cfg.teacher_width = 16;
    cfg.n_train = 40;
    cfg.n_test = 5;
    GeneratedData data = gen_teacher_student(cfg, 3);
    std::string path = (dir / "reg.csv").string();
    save_csv_dataset(path, data.train);
    Dataset back = load_csv_dataset(path, TaskKind::regression);
    REQUIRE(back.n() == 40);
    REQUIRE(back.input_dim == 5);
    for (std::size_t i = 0; i < back.n(); ++i) {
        REQUIRE(back.examples[i].x == data.train.examples[i].x);
        REQUIRE(back.examples[i].y == data.train.examples[i].y);
    }

    SECTION("classification round-trip keeps integer labels") {
        GenConfig ccfg = cfg;
        ccfg.task = TaskKind::classification;
        ccfg.classes = 3;
        ccfg.n_train = 30;
        GeneratedData cdata = gen_teacher_student(ccfg, 9);
        std::string cpath = (dir / "cls.csv").string();
        save_csv_dataset(cpath, cdata.train);
        Dataset cback = load_csv_dataset(cpath, TaskKind::classification);
        REQUIRE(cback.num_classes == 3);
        for (std::size_t i = 0; i < cback.n(); ++i)
            REQUIRE(cback.examples[i].label == cdata.train.examples[i].label);
    }

    SECTION("header flag skips the first line") {
        std::string hpath = (dir / "hdr.csv").string();
        {
            std::ofstream out(hpath);
            out << "f0,f1,target\n0.5,1.5,2\n-1,0.25,-0.5\n";
        }
        Dataset ds = load_csv_dataset(hpath, TaskKind::regression, true);
        REQUIRE(ds.n() == 2);
        CHECK(ds.examples[0].x == std::vector<double>{0.5, 1.5});
        CHECK(ds.examples[1].y == -0.5);
        CHECK_THROWS_AS(load_csv_dataset(hpath, TaskKind::regression, false), ParseError);
    }

    SECTION("bad float reports its 1-based line number") {
        std::string bpath = (dir / "bad.csv").string();
        {
            std::ofstream out(bpath);
            out << "1,2,3\n4,5,6\n7,oops,9\n";
        }
        try {
            load_csv_dataset(bpath, TaskKind::regression);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line == 3);
        }
    }

    SECTION("feature width drift is a schema error") {
        std::string spath = (dir / "schema.csv").string();
        {
            std::ofstream out(spath);
            out << "1,2,3\n4,5,6,7\n";
        }
        CHECK_THROWS_AS(load_csv_dataset(spath, TaskKind::regression), SchemaError);
    }

    SECTION("empty and missing files") {
        std::string epath = (dir / "empty.csv").string();
        { std::ofstream out(epath); }
        CHECK_THROWS_AS(load_csv_dataset(epath, TaskKind::regression), EmptyDatasetError);
        CHECK_THROWS_AS(load_csv_dataset((dir / "nope.csv").string(), TaskKind::regression),
                        IoError);
    }

    SECTION("negative class labels are rejected") {
        std::string npath = (dir / "neg.csv").string();
        {
            std::ofstream out(npath);
            out << "1,2,-1\n";
        }
        CHECK_THROWS_AS(load_csv_dataset(npath, TaskKind::classification), ParseError);
    }
}

TEST_CASE("batch trajectory partitions the index set every epoch") {
    BatchTrajectory traj(24, 4, 123);
    CHECK(traj.batches_per_epoch() == 6);

    for (std::uint64_t epoch : {1ULL, 2ULL, 7ULL}) {
        auto batches = traj.batches(epoch);
        REQUIRE(batches.size() == 6);
        std::set<std::size_t> seen;
        for (const auto& b : batches) {
            REQUIRE(b.size() == 4);
            seen.insert(b.begin(), b.end());
        }
        REQUIRE(seen.size() == 24);
        REQUIRE(*seen.begin() == 0);
        REQUIRE(*seen.rbegin() == 23);
    }
}

TEST_CASE("batch schedules replay by (seed, epoch) and differ across epochs") {
    BatchTrajectory traj(40, 8, 9);
    CHECK(traj.batches(3) == traj.batches(3));
    CHECK(traj.batches(3) != traj.batches(4));
    BatchTrajectory other(40, 8, 10);
    CHECK(traj.batches(3) != other.batches(3));
}

TEST_CASE("batch size must divide n") {
    CHECK_THROWS_AS(BatchTrajectory(10, 3, 1), std::invalid_argument);
    CHECK_THROWS_AS(BatchTrajectory(10, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(BatchTrajectory(10, 11, 1), std::invalid_argument);
    CHECK_THROWS_AS(BatchTrajectory(0, 1, 1), std::invalid_argument);
    BatchTrajectory ok(10, 10, 1);  // full batch is one block per epoch
    CHECK(ok.batches(1).size() == 1);
}
