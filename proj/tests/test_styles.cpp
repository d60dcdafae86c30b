#include <gtest/gtest.h>

#include <random>

#include "cdc/styles.hpp"
#include "cdc/units.hpp"

using namespace cdc;

namespace {

// sp values from an independent scan_dimen computation.
constexpr Sp k1cm = 1864679;
constexpr Sp k15mm = 2797019;

struct Expected {
    Param param;
    std::int32_t raw;  // sp for lengths, 16.16 for fractions
};

const Expected kDefaults[] = {
    {Param::Grid, k1cm},
    {Param::XGrid, k1cm},
    {Param::YGrid, k1cm},
    {Param::Range, 65536},
    {Param::DiagramPad, 327680},
    {Param::FigurePad, 0},
    {Param::GraphPad, 0},
    {Param::VPad, 0},
    {Param::HPad, 0},
    {Param::GridGray, 32768},
    {Param::FrameGray, 0},
    {Param::ShadeGray, 0},
    {Param::GrayGray, 32768},
    {Param::FramePad, 327680},
    {Param::FrameRuleWidth, 26214},
    {Param::FrameRuleWidthOuter, 26214},
    {Param::RuleWidth, 327680},
    {Param::CellLength, k1cm},
    {Param::CellWidth, k1cm},
    {Param::ColumnDist, k15mm},
    {Param::BraceWidth, k1cm},
    {Param::MinimumCellLength, 0},
    {Param::LabelPoint, 32768},
    {Param::PtPoint, 32768},
    {Param::LabelWidthPad, 327680},
    {Param::LabelPad, 196608},
    {Param::BreakPad, 163840},
    {Param::CellPush, 131072},
    {Param::PtPush, 0},
    {Param::AtPush, 196608},
    {Param::JoinPush, -65536},
};

std::int32_t global_raw(const StyleRegistry& r, Param p) {
    return param_info(p).type == ParamType::Length ? r.length(p) : r.fraction(p).raw;
}

}  // namespace

TEST(Defaults, EveryGlobalDefaultSpExact) {
    const StyleRegistry r = StyleRegistry::builtin();
    ASSERT_EQ(std::size(kDefaults), kParamCount);
    for (const auto& e : kDefaults) {
        EXPECT_EQ(global_raw(r, e.param), e.raw) << param_info(e.param).name;
    }
}

TEST(Defaults, DoubleClassPadOverrides) {
    const StyleRegistry r = StyleRegistry::builtin();
    for (const char* cell : {"Two", "Impl", "Bar", "Null", "Eq"}) {
        EXPECT_EQ(r.per_cell(Param::LabelPad, cell), 52429) << cell;
        EXPECT_EQ(r.per_cell(Param::AtPush, cell), 52429) << cell;
        EXPECT_EQ(r.per_cell(Param::BreakPad, cell), 52429) << cell;
        EXPECT_EQ(r.effective_length(Param::LabelPad, cell), 196608 + 52429) << cell;
    }
}

TEST(Defaults, RuleOverrides) {
    const StyleRegistry r = StyleRegistry::builtin();
    EXPECT_EQ(r.per_cell(Param::CellPush, "Rule"), 65536);
    EXPECT_EQ(r.per_cell(Param::PtPush, "Rule"), 65536);
    EXPECT_EQ(r.per_cell(Param::JoinPush, "Rule"), 65536);
    EXPECT_EQ(r.effective_length(Param::JoinPush, "Rule"), 0);
    EXPECT_EQ(r.effective_length(Param::CellPush, "To"), 131072);
}

TEST(Catalog, BuiltinCellsAndFills) {
    const StyleRegistry r = StyleRegistry::builtin();
    for (const char* n : {"To", "One", "Bij", "Mapsto", "Into", "Epi", "Line", "Nul", "Dots", "Two", "Impl", "Bar",
                          "Null", "Eq", "Rule", "Fillcell", "Boxcell"}) {
        EXPECT_NE(r.find_cell(n), nullptr) << n;
    }
    EXPECT_EQ(r.find_cell("Mapsto")->fill.tail, Glyph::Bar);
    EXPECT_EQ(r.find_cell("Into")->fill.tail, Glyph::Hook);
    EXPECT_EQ(r.find_cell("Epi")->fill.head, Glyph::DoubleArrowhead);
    EXPECT_EQ(r.find_cell("Bij")->fill.tail, Glyph::Arrowhead);
    EXPECT_EQ(r.find_cell("Dots")->fill.shaft, Shaft::Dots);
    EXPECT_EQ(r.find_cell("Two")->fill.shaft, Shaft::Double);
    EXPECT_TRUE(r.find_cell("Eq")->fill.centered_equals);
    EXPECT_EQ(r.find_cell("Rule")->kind, CellKind::Rule);
    for (const char* n : {"Fillcell", "Boxcell"}) {
        for (Param p : {Param::LabelPad, Param::CellPush, Param::AtPush, Param::JoinPush}) {
            EXPECT_EQ(r.per_cell(p, n), 0) << n;
        }
    }
}

TEST(Catalog, RegisterCellAddsZeroRow) {
    StyleRegistry r = StyleRegistry::builtin();
    r.register_cell("Onto", {Glyph::None, Shaft::Single, Glyph::DoubleArrowhead});
    EXPECT_EQ(r.effective_length(Param::LabelPad, "Onto"), 196608);
    EXPECT_FALSE(r.per_cell(Param::LabelPad, "Onto").has_value());
}

TEST(Catalog, DuplicateRegistrationFailsWithoutMutation) {
    StyleRegistry r = StyleRegistry::builtin();
    const std::string before = r.fingerprint();
    try {
        r.register_cell("To", {});
        FAIL();
    } catch (const StyleError& e) {
        EXPECT_NE(std::string(e.what()).find("registration"), std::string::npos);
    }
    EXPECT_EQ(r.fingerprint(), before);
}

TEST(SetParam, RelativeAndAbsolute) {
    StyleRegistry r = StyleRegistry::builtin();
    r.set_param("ygrid", "", "-2mm", SetMode::Relative);
    // 1cm - 2mm with both sides truncated separately; 8mm scans to one less.
    EXPECT_EQ(r.length(Param::YGrid), 1491744);
    r.set_param("labelpoint", "", ".5", SetMode::Absolute);
    EXPECT_EQ(r.fraction(Param::LabelPoint).raw, 32768);
}

TEST(SetParam, GridInheritance) {
    StyleRegistry r = StyleRegistry::builtin();
    r.set_param("grid", "", "0sp", SetMode::Absolute);
    EXPECT_EQ(r.length(Param::XGrid), 0);
    EXPECT_EQ(r.length(Param::YGrid), 0);
    r.set_param("xgrid", "", "3pt", SetMode::Absolute);
    EXPECT_EQ(r.length(Param::XGrid), 196608);
    EXPECT_EQ(r.length(Param::YGrid), 0);
}

TEST(SetParam, Errors) {
    StyleRegistry r = StyleRegistry::builtin();
    EXPECT_THROW(r.set_param("nosuch", "", "1pt", SetMode::Absolute), StyleError);
    EXPECT_THROW(r.set_param("grid", "", "1furlong", SetMode::Absolute), StyleError);
    EXPECT_THROW(r.set_param("cellpush", "NoCell", "1pt", SetMode::Absolute), StyleError);
}

TEST(SetParam, AdditivityRandom) {
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> v(-1000000, 1000000);
    for (int i = 0; i < 500; ++i) {
        StyleRegistry r = StyleRegistry::builtin();
        const int g = v(rng), p = v(rng);
        r.set_param("cellpush", "", std::to_string(g) + "sp", SetMode::Absolute);
        r.set_param("cellpush", "To", std::to_string(p) + "sp", SetMode::Absolute);
        ASSERT_EQ(r.effective_length(Param::CellPush, "To"), g + p);
    }
}

TEST(Metrics, DefaultModel) {
    const EmMetrics m;
    EXPECT_EQ(m.measure("", TextStyle::Vertex), (TextBox{0, 0, 0}));
    EXPECT_EQ(m.measure("AB", TextStyle::Vertex), (TextBox{655360, 458752, 131072}));
    EXPECT_EQ(m.measure("f", TextStyle::Label), (TextBox{229376, 321126, 91750}));
    // Codepoints, not bytes.
    EXPECT_EQ(m.measure("\xce\xb1", TextStyle::Vertex).w, 327680);
}

TEST(Metrics, FileOverrides) {
    const EmMetrics m = EmMetrics::parse("# sizes\nem vertexstyle 20\nem labelstyle 10\n");
    EXPECT_EQ(m.measure("A", TextStyle::Vertex).w, 10 * 65536);
    EXPECT_EQ(m.measure("f", TextStyle::Label).w, 5 * 65536);
    EXPECT_THROW(EmMetrics::parse("em mathstyle 3\n"), StyleError);
    EXPECT_THROW(EmMetrics::parse("em vertexstyle x\n"), StyleError);
}

TEST(Units, ScanDimen) {
    using units::parse_length;
    EXPECT_EQ(parse_length("1mm"), 186467);
    EXPECT_EQ(parse_length("1cm"), k1cm);
    EXPECT_EQ(parse_length("8mm"), 1491743);
    EXPECT_EQ(parse_length("-.8pt"), -52429);
    EXPECT_EQ(parse_length("3sp"), 3);
    EXPECT_FALSE(parse_length("3").has_value());
    EXPECT_FALSE(parse_length("pt").has_value());
    EXPECT_EQ(units::parse_fraction(".25")->raw, 16384);
    EXPECT_EQ(units::format_pt3(65536 * 12 + 32768), "12.500");
    EXPECT_EQ(units::format_length(units::parse_length("2.5pt").value()), "2.5pt");
}
