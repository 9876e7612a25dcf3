#include "hypersweep/jobspec.hpp"
#include "hypersweep/objectstore.hpp"

#include <doctest.h>

#include <algorithm>

#include "testutil.hpp"

using namespace hypersweep;
using namespace hypersweep::jobspec;

namespace {

gridlab::ExperimentSpec make_spec() {
    gridlab::ExperimentSpec spec;
    spec.bindings = {{"lr", "1e-4"}, {"bs", "16"}, {"data", "norm"}};
    spec.id = gridlab::spec_id(spec.bindings);
    return spec;
}

JobTemplate make_template() {
    JobTemplate t;
    t.image = "registry.local/segtrain:2.4";
    t.command = {"python", "-m", "segtrain.{{phase}}", "--lr", "{{lr}}",
                 "--batch-size", "{{bs}}", "--data", "/staging/{{data}}",
                 "--sink", "{{sink}}"};
    t.volume_name = "staging-volume";
    t.volume_mount = "/staging";
    t.artifact_sink = "s3://artifacts/{{id}}/{{phase}}";
    return t;
}

const ResourceRequest kTrainResources{4, 24.0, 2, std::nullopt};

}  // namespace

TEST_CASE("render resolves placeholders, name and env") {
    const auto spec = make_spec();
    const auto m = render(spec, make_template(), kTrainResources, Phase::Train);

    CHECK(m.name == spec.id + "-train");
    CHECK(m.image == "registry.local/segtrain:2.4");
    CHECK(m.artifact_sink == "s3://artifacts/" + spec.id + "/train");
    REQUIRE(m.command.size() == 11);
    CHECK(m.command[2] == "segtrain.train");
    CHECK(m.command[4] == "1e-4");
    CHECK(m.command[6] == "16");
    CHECK(m.command[8] == "/staging/norm");
    CHECK(m.command[10] == m.artifact_sink);  // {{sink}} refers to the resolved sink
    CHECK(m.env == std::map<std::string, std::string>{
                       {"LR", "1e-4"}, {"BS", "16"}, {"DATA", "norm"}});
}

TEST_CASE("a spec renders to exactly one train and one eval manifest") {
    const auto spec = make_spec();
    const auto pair = render_pair(spec, make_template(), kTrainResources);
    REQUIRE(pair.size() == 2);
    CHECK(pair[0].phase == Phase::Train);
    CHECK(pair[1].phase == Phase::Eval);
    CHECK(pair[0].name == spec.id + "-train");
    CHECK(pair[1].name == spec.id + "-eval");
    CHECK(pair[0].image == pair[1].image);
}

TEST_CASE("unbound and unterminated placeholders are rejected") {
    auto tmpl = make_template();
    tmpl.command.push_back("{{missing}}");
    CHECK_THROWS_AS(render(make_spec(), tmpl, kTrainResources, Phase::Train),
                    UnboundPlaceholderError);

    tmpl = make_template();
    tmpl.image = "broken/{{lr";
    CHECK_THROWS_AS(render(make_spec(), tmpl, kTrainResources, Phase::Train),
                    JobspecError);
}

TEST_CASE("training manifests require at least one GPU") {
    ResourceRequest cpu_only{4, 8.0, 0, std::nullopt};
    CHECK_THROWS_AS(render(make_spec(), make_template(), cpu_only, Phase::Train),
                    JobspecError);
    // non-training phases may be CPU-only
    CHECK_NOTHROW(render(make_spec(), make_template(), cpu_only, Phase::Download));
}

TEST_CASE("serialization is a canonical fixed point") {
    const auto m = render(make_spec(), make_template(), kTrainResources, Phase::Train);
    const std::string first = serialize(m);
    CHECK(serialize(parse(first)) == first);
    CHECK(parse(first) == m);
}

TEST_CASE("serialized env order ignores insertion order") {
    auto m = render(make_spec(), make_template(), kTrainResources, Phase::Train);
    JobManifest shuffled = m;
    shuffled.env.clear();
    for (auto it = m.env.rbegin(); it != m.env.rend(); ++it)
        shuffled.env.emplace(it->first, it->second);
    CHECK(serialize(shuffled) == serialize(m));
}

TEST_CASE("manifests with optional vram constraint round-trip") {
    ResourceRequest r{8, 64.0, 4, 40.0};
    const auto m = render(make_spec(), make_template(), r, Phase::Eval);
    const auto back = parse(serialize(m));
    REQUIRE(back.resources.min_gpu_vram_gb.has_value());
    CHECK(*back.resources.min_gpu_vram_gb == 40.0);
}

TEST_CASE("template files parse strictly") {
    CHECK_THROWS_AS(parse_template("{}"), JobspecError);
    const char* doc = R"({
        "image": "img", "command": ["run"],
        "volume": {"name": "v", "mount": "/m"},
        "artifact_sink": "s3://x/{{id}}"
    })";
    const auto t = parse_template(doc);
    CHECK(t.image == "img");
    CHECK(t.volume_mount == "/m");
}

TEST_CASE("sync uploads everything into an empty store exactly once") {
    testutil::ScratchDir scratch("sync-fresh");
    DirStore store(scratch.path);

    std::vector<StagedObject> staged;
    for (int i = 0; i < 30; ++i)
        staged.push_back(make_staged("run/model-" + std::to_string(i) + ".bin",
                                     "weights-" + std::to_string(i)));

    const SyncReport first = sync(staged, store);
    CHECK(first.uploaded == 30);
    CHECK(first.skipped == 0);

    const SyncReport second = sync(staged, store);
    CHECK(second.uploaded == 0);
    CHECK(second.skipped == 30);
    CHECK(second.bytes_moved == 0);
}

TEST_CASE("sync uploads only changed or missing objects") {
    testutil::ScratchDir scratch("sync-delta");
    DirStore store(scratch.path);

    std::vector<StagedObject> staged = {
        make_staged("a.txt", "one"),
        make_staged("b.txt", "two"),
        make_staged("c.txt", "three"),
    };
    sync(staged, store);

    staged[1] = make_staged("b.txt", "two-changed");
    staged.push_back(make_staged("d.txt", "four"));
    const SyncReport delta = sync(staged, store);
    CHECK(delta.uploaded == 2);
    CHECK(delta.skipped == 2);

    const auto stored = store.get("b.txt");
    CHECK(std::string(reinterpret_cast<const char*>(stored.data()), stored.size()) ==
          "two-changed");
}

TEST_CASE("sync rejects duplicate staged keys") {
    testutil::ScratchDir scratch("sync-dup");
    DirStore store(scratch.path);
    std::vector<StagedObject> staged = {make_staged("k", "a"), make_staged("k", "b")};
    CHECK_THROWS_AS(sync(staged, store), std::invalid_argument);
}

TEST_CASE("store listings are sorted and hash-addressed") {
    testutil::ScratchDir scratch("store-list");
    DirStore store(scratch.path);
    sync({make_staged("z/2", "zz"), make_staged("a/1", "aa"), make_staged("a/2", "ab")},
         store);

    const auto all = store.list("");
    REQUIRE(all.size() == 3);
    CHECK(std::is_sorted(all.begin(), all.end(),
                         [](const auto& x, const auto& y) { return x.key < y.key; }));
    const auto prefixed = store.list("a/");
    CHECK(prefixed.size() == 2);
    CHECK(prefixed[0].content_hash == make_staged("a/1", "aa").content_hash);
}
