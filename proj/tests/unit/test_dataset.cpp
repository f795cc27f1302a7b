#include <gtest/gtest.h>

#include "padwerk/dataset.hpp"
#include "padwerk/error.hpp"
#include "padwerk/synthetic.hpp"
#include "test_support.hpp"

using namespace padwerk;
using padwerk::testing::TempDir;

namespace fs = std::filesystem;

TEST(Dataset, PathHelpers) {
    EXPECT_EQ(sample_relative_path(Label::monitored(3, 4, 5)), fs::path("monitored/s3-p4-5.trace"));
    EXPECT_EQ(sample_relative_path(Label::unmonitored(12)), fs::path("unmonitored/12.trace"));
    EXPECT_EQ(relay_path_for("a/monitored/s3-p4-5.trace"), fs::path("a/monitored/s3-p4-5.relay.trace"));
    EXPECT_TRUE(is_security_level("safest"));
    EXPECT_FALSE(is_security_level("medium"));
}

TEST(Dataset, SaveLoadRoundTrip) {
    SyntheticOptions o;
    o.sites = 2;
    o.webpages = 2;
    o.samples = 2;
    o.unmonitored = 3;
    const Dataset ds = make_synthetic_dataset(o);
    TempDir dir;
    save_dataset(ds, dir.path(), "safer");
    const Dataset back = load_dataset(dir.path(), "safer");
    ASSERT_EQ(back.size(), ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_EQ(back.samples[i].label, ds.samples[i].label);
        EXPECT_EQ(back.samples[i].client.events, ds.samples[i].client.events);
        EXPECT_EQ(back.samples[i].relay.events, ds.samples[i].relay.events);
    }
}

TEST(Dataset, DerivesMissingRelayAndNormalizesOrigin) {
    TempDir dir;
    write_text_file(dir.path() / "standard/monitored/s0-p0-0.trace", "1000\tsnp\n3000\trnp\n");
    const Dataset ds = load_dataset(dir.path(), "standard", {.one_way_delay_ns = 500});
    ASSERT_EQ(ds.size(), 1u);
    const Sample& s = ds.samples[0];
    EXPECT_EQ(s.label, Label::monitored(0, 0, 0));
    ASSERT_EQ(s.client.events.size(), 2u);
    EXPECT_EQ(s.client.events[0].time_ns, 0);
    EXPECT_EQ(s.client.events[1].time_ns, 2000);
    ASSERT_EQ(s.relay.events.size(), 2u);
    EXPECT_EQ(s.relay.events[0], (CellEvent{500, CellKind::nonpadding_received}));
    EXPECT_EQ(s.relay.events[1], (CellEvent{1500, CellKind::nonpadding_sent}));
}

TEST(Dataset, TruncatesToMaxEvents) {
    TempDir dir;
    std::string text;
    for (int i = 0; i < 30; ++i) text += std::to_string(i * 10) + "\trnp\n";
    write_text_file(dir.path() / "standard/unmonitored/4.trace", text);
    const Dataset ds = load_dataset(dir.path(), "standard", {.max_events = 12});
    ASSERT_EQ(ds.size(), 1u);
    EXPECT_EQ(ds.samples[0].client.events.size(), 12u);
    EXPECT_EQ(ds.samples[0].label, Label::unmonitored(4));
}

TEST(Dataset, ManifestListsSamples) {
    TempDir dir;
    write_text_file(dir.path() / "safest/files/a.trace", "0\tsnp\n");
    write_text_file(dir.path() / "safest/files/b.trace", "0\trnp\n");
    write_text_file(dir.path() / "safest/manifest.txt", "# test\nu7\tfiles/b.trace\ns1-p2-3\tfiles/a.trace\n");
    const Dataset ds = load_dataset(dir.path(), "safest");
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.samples[0].label, Label::monitored(1, 2, 3));
    EXPECT_EQ(ds.samples[1].label, Label::unmonitored(7));
    EXPECT_EQ(ds.samples[1].client.events[0].kind, CellKind::nonpadding_received);
}

TEST(Dataset, Errors) {
    TempDir dir;
    EXPECT_THROW(load_dataset(dir.path(), "standard"), DataError);
    EXPECT_THROW(load_dataset(dir.path(), "bogus"), DataError);
    write_text_file(dir.path() / "standard/monitored/s0-p0-0.trace", "0\tsnp\nbad\n");
    EXPECT_THROW(load_dataset(dir.path(), "standard"), DataError);
    write_text_file(dir.path() / "safer/monitored/weird.trace", "0\tsnp\n");
    EXPECT_THROW(load_dataset(dir.path(), "safer"), DataError);
    write_text_file(dir.path() / "safest/manifest.txt", "u1\tx.trace\nu1\tx.trace\n");
    write_text_file(dir.path() / "safest/x.trace", "0\tsnp\n");
    EXPECT_THROW(load_dataset(dir.path(), "safest"), DataError);
}

TEST(Synthetic, ShapeAndDeterminism) {
    SyntheticOptions o;
    o.sites = 3;
    o.webpages = 4;
    o.samples = 5;
    o.unmonitored = 7;
    const Dataset a = make_synthetic_dataset(o);
    const Dataset b = make_synthetic_dataset(o);
    ASSERT_EQ(a.size(), 3u * 4 * 5 + 7);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.samples[i].client, b.samples[i].client);
        const auto& ev = a.samples[i].client.events;
        ASSERT_FALSE(ev.empty());
        EXPECT_EQ(ev.front().time_ns, 0);
        EXPECT_LE(ev.size(), kMaxDatasetEvents);
        for (const auto& e : ev) EXPECT_FALSE(is_padding(e.kind));
    }
    o.seed = 2;
    EXPECT_NE(make_synthetic_dataset(o).samples[0].client, a.samples[0].client);
    o.sites = 51;
    EXPECT_THROW(make_synthetic_dataset(o), ValidationError);
}
