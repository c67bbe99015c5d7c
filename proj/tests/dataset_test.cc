// Copyright 2026 The shufflesum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shufflesum/dataset.h"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>
#include "absl/strings/str_cat.h"
#include "test_util.h"

namespace shufflesum {
namespace {

using ::shufflesum::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::string WriteTemp(const std::string& name, const std::string& text) {
  const std::string path =
      (std::filesystem::path(::testing::TempDir()) / name).string();
  std::ofstream(path) << text;
  return path;
}

std::vector<double> Values(const DatasetMatrix& m) {
  return {m.values().begin(), m.values().end()};
}

TEST(IngestCsvTest, ReadsMatrixAsWritten) {
  const std::string path = WriteTemp("plain.csv", "0.2,0.8\n1.0,0.0\n");
  ASSERT_OK_AND_ASSIGN(DatasetMatrix m, IngestCsv(path, {}));
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m.cols(), 2);
  EXPECT_THAT(Values(m), ElementsAre(0.2, 0.8, 1.0, 0.0));
  EXPECT_TRUE(m.InUnitRange());
}

TEST(IngestCsvTest, MinMaxNormalization) {
  const std::string path = WriteTemp("wide.csv", "0,50\n200,100\n150,25\n");
  IngestOptions options;
  options.normalize = Normalization::kMinMax;
  ASSERT_OK_AND_ASSIGN(DatasetMatrix m, IngestCsv(path, options));
  EXPECT_THAT(Values(m), ElementsAre(0.0, 0.25, 1.0, 0.5, 0.75, 0.125));
  EXPECT_TRUE(m.InUnitRange());
}

TEST(IngestCsvTest, ClampsByDefault) {
  const std::string path = WriteTemp("clamp.csv", "-1,0.5\n2,0.25\n");
  ASSERT_OK_AND_ASSIGN(DatasetMatrix m, IngestCsv(path, {}));
  EXPECT_THAT(Values(m), ElementsAre(0.0, 0.5, 1.0, 0.25));
  EXPECT_THAT(m.provenance(), ::testing::Contains(HasSubstr("clamped 2")));
}

TEST(IngestCsvTest, SkipsHeaderAndWhitespace) {
  const std::string path =
      WriteTemp("header.csv", "a, b ,c\n 0.1 ,0.2,0.3\r\n\n0.4,0.5,0.6\n");
  ASSERT_OK_AND_ASSIGN(DatasetMatrix m, IngestCsv(path, {}));
  EXPECT_EQ(m.rows(), 2);
  EXPECT_THAT(Values(m), ElementsAre(0.1, 0.2, 0.3, 0.4, 0.5, 0.6));
}

TEST(IngestCsvTest, ReportsBadCellPosition) {
  const std::string path = WriteTemp("bad.csv", "0.1,0.2\n0.3,oops\n");
  absl::StatusOr<DatasetMatrix> m = IngestCsv(path, {});
  EXPECT_THAT(m, StatusIs(absl::StatusCode::kDataLoss));
  EXPECT_THAT(std::string(m.status().message()), HasSubstr("bad.csv:2: column 2"));
}

TEST(IngestCsvTest, RejectsRaggedRows) {
  const std::string path = WriteTemp("ragged.csv", "0.1,0.2\n0.3\n");
  EXPECT_THAT(IngestCsv(path, {}), StatusIs(absl::StatusCode::kDataLoss));
}

TEST(IngestCsvTest, EmptyAndMissingFiles) {
  EXPECT_THAT(IngestCsv(WriteTemp("empty.csv", ""), {}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(IngestCsv(WriteTemp("only_header.csv", "x,y\n"), {}),
              StatusIs(absl::StatusCode::kInvalidArgument));
  EXPECT_THAT(IngestCsv("/nonexistent/shufflesum.csv", {}),
              StatusIs(absl::StatusCode::kNotFound));
}

// Same shape as the heartbeat files: 187 features plus a class label.
TEST(IngestCsvTest, DropsLabelAndTruncatesToRequestedDimension) {
  std::string text;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 187; ++c) absl::StrAppend(&text, (r + c) % 10 / 10.0, ",");
    absl::StrAppend(&text, r % 5, ".0\n");
  }
  const std::string path = WriteTemp("heartbeat_like.csv", text);
  IngestOptions options;
  options.drop_label = true;
  options.target_cols = 100;
  ASSERT_OK_AND_ASSIGN(DatasetMatrix m, IngestCsv(path, options));
  EXPECT_EQ(m.rows(), 5);
  EXPECT_EQ(m.cols(), 100);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 100; ++c) EXPECT_DOUBLE_EQ(m.row(r)[c], (r + c) % 10 / 10.0);
  }
  EXPECT_THAT(m.provenance(), ::testing::Contains(HasSubstr("label dropped")));
  EXPECT_THAT(m.provenance(), ::testing::Contains(HasSubstr("columns truncated from 187 to 100")));
}

TEST(ReshapeTest, RecyclesRowsAndPadsColumns) {
  DatasetMatrix m(2, 2, {0.1, 0.2, 0.3, 0.4});
  DatasetMatrix r = Reshape(m, 5, 3);
  EXPECT_EQ(r.rows(), 5);
  EXPECT_EQ(r.cols(), 3);
  EXPECT_THAT(Values(r), ElementsAre(0.1, 0.2, 0.0, 0.3, 0.4, 0.0, 0.1, 0.2, 0.0,
                                     0.3, 0.4, 0.0, 0.1, 0.2, 0.0));
  EXPECT_EQ(r.provenance().size(), 2u);
  DatasetMatrix t = Reshape(m, 1, 1);
  EXPECT_THAT(Values(t), ElementsAre(0.1));
  DatasetMatrix same = Reshape(m, 2, 2);
  EXPECT_TRUE(same.provenance().empty());
}

TEST(ParseNormalizationTest, Names) {
  EXPECT_EQ(*ParseNormalization("clamp"), Normalization::kClamp);
  EXPECT_EQ(*ParseNormalization("minmax"), Normalization::kMinMax);
  EXPECT_THAT(ParseNormalization("zscore"), StatusIs(absl::StatusCode::kInvalidArgument));
}

TEST(SyntheticHeartbeatsTest, ShapeRangeAndDeterminism) {
  DatasetMatrix a = SyntheticHeartbeats(300, 187, 5);
  DatasetMatrix b = SyntheticHeartbeats(300, 187, 5);
  DatasetMatrix c = SyntheticHeartbeats(300, 187, 6);
  EXPECT_EQ(a.rows(), 300);
  EXPECT_EQ(a.cols(), 187);
  EXPECT_TRUE(a.InUnitRange());
  EXPECT_EQ(Values(a), Values(b));
  EXPECT_NE(Values(a), Values(c));
  // Beats start at their R peak and end in zero padding.
  double first = 0.0, last = 0.0;
  for (int r = 0; r < a.rows(); ++r) {
    first += a.row(r)[0] / a.rows();
    last += a.row(r)[186] / a.rows();
  }
  EXPECT_GT(first, 0.8);
  EXPECT_LT(last, 0.05);
}

}  // namespace
}  // namespace shufflesum
