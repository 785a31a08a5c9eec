#include <gtest/gtest.h>

#include <cmath>

#include "hlift/error.hpp"
#include "hlift/lifting.hpp"
#include "hlift/robustness.hpp"
#include "test_util.hpp"

namespace hlift {
namespace {

using test::pose_rig;

ContextMap random_context(int w, int h, int c, Rng& rng) {
  ContextMap ctx(w, h, c);
  for (double& x : ctx.data) x = rng.uniform(-1.0, 1.0);
  return ctx;
}

DistributionMap random_dist(int w, int h, int n, Rng& rng) {
  DistributionMap d(w, h, n);
  for (std::size_t m = 0; m < d.cell_count(); ++m) {
    double sum = 0.0;
    for (double& x : d.cell(m)) sum += (x = rng.uniform());
    for (double& x : d.cell(m)) x /= sum;
  }
  return d;
}

DistributionMap one_hot(int w, int h, int n, int bin) {
  DistributionMap d(w, h, n);
  for (std::size_t m = 0; m < d.cell_count(); ++m) d.cell(m)[static_cast<std::size_t>(bin)] = 1.0;
  return d;
}

TEST(Fuse, UniformDistributionScalesContext) {
  Rng rng(1);
  DistributionMap d(3, 2, 4);
  for (double& x : d.data) x = 0.25;
  const ContextMap ctx = random_context(3, 2, 5, rng);
  const FusedMap f = fuse(ctx, d);
  for (std::size_t m = 0; m < f.cell_count(); ++m)
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 5; ++c) EXPECT_DOUBLE_EQ(f.at(m, i, c), ctx.cell(m)[c] / 4.0);
}

TEST(Fuse, OneHotKeepsSingleSlice) {
  Rng rng(2);
  const ContextMap ctx = random_context(2, 2, 3, rng);
  const FusedMap f = fuse(ctx, one_hot(2, 2, 6, 4));
  for (std::size_t m = 0; m < f.cell_count(); ++m)
    for (int i = 0; i < 6; ++i)
      for (int c = 0; c < 3; ++c) EXPECT_EQ(f.at(m, i, c), i == 4 ? ctx.cell(m)[c] : 0.0);
}

TEST(Fuse, MatchesTripleLoop) {
  Rng rng(3);
  const ContextMap ctx = random_context(2, 2, 3, rng);
  const DistributionMap dist = random_dist(2, 2, 4, rng);
  const auto dense = fuse(ctx, dist).dense();
  std::size_t k = 0;
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(dense[k++], ctx.data[m * 3 + c] * dist.data[m * 4 + i], 1e-15);
  EXPECT_EQ(k, dense.size());
}

TEST(Fuse, ShapeMismatch) {
  Rng rng(4);
  try {
    fuse(random_context(2, 2, 3, rng), random_dist(2, 3, 4, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  DistributionMap bad(1, 1, 2);
  bad.data = {0.7, 0.7};
  EXPECT_THROW(fuse(ContextMap(1, 1, 1), bad), Error);
}

TEST(LiftHeight, LevelCameraExample) {
  const CameraRig rig = pose_rig(5.0, 0.0, 0.0, 0.0, test::default_intrinsics(1200));
  const Vec3 ref = rig.cam_to_virt() * pixel_to_ref_cam(768.0, 932.0, rig.intrinsics());
  const Vec3 virt0 = ((5.0 - 0.0) / ref.y()) * ref;
  EXPECT_LT((virt0 - Vec3(0.0, 5.0, 10.0)).norm(), 1e-12);
  const Vec3 p0 = lift_pixel_height(768.0, 932.0, 0.0, rig);
  EXPECT_LT((p0 - Vec3(10.0, 0.0, 0.0)).norm(), 1e-12);

  const Vec3 virt1 = ((5.0 - 2.5) / ref.y()) * ref;
  EXPECT_LT((virt1 - Vec3(0.0, 2.5, 5.0)).norm(), 1e-12);
  const Vec3 p1 = lift_pixel_height(768.0, 932.0, 2.5, rig);
  EXPECT_LT((p1 - Vec3(5.0, 0.0, 2.5)).norm(), 1e-12);
}

TEST(LiftHeight, Errors) {
  const CameraRig level = pose_rig(5.0, 0.0);
  try {
    lift_pixel_height(768.0, 432.0, 0.0, level);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kHorizonRay);
  }
  try {
    lift_pixel_height(768.0, 800.0, 5.0, level);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAboveCamera);
  }
  EXPECT_EQ(try_lift_pixel_height(768.0, 100.0, 0.0, level).status, LiftStatus::kHorizonRay);
  EXPECT_EQ(try_lift_pixel_height(-1.0, 800.0, 0.0, level).status, LiftStatus::kOutsideImage);
}

TEST(LiftHeight, RoundTripRayMembershipAndStepwiseForm) {
  Rng rng(99);
  int checked = 0;
  for (int r = 0; r < 10; ++r) {
    const CameraRig rig = test::random_rig(rng);
    const HeightLifter lifter(rig);
    const auto& k = rig.intrinsics();
    for (int s = 0; s < 1000; ++s) {
      const double u = rng.uniform(0.0, k.image_w), v = rng.uniform(0.0, k.image_h);
      const double h = rng.uniform(-1.0, std::min(1.0, rig.ground_height() - 1e-3));
      if (!(lifter.ref_y(u, v) > 0.05)) continue;
      const Vec3 p = lift_pixel_height(u, v, h, rig);
      EXPECT_NEAR(p.z(), h, 1e-9);

      const Vec3 c = rig.camera_center();
      const Vec3 dir = rig.cam_to_ego().rotation * pixel_to_ref_cam(u, v, k);
      EXPECT_LT((p - c).cross(dir.normalized()).norm(), 1e-9);

      // Reference plane, virtual rotation, similar triangles, back to ego.
      const Vec3 p_ref = k.matrix().inverse() * Vec3(u, v, 1.0);
      const Vec3 p_ref_virt = rig.cam_to_virt() * p_ref;
      const Vec3 p_virt = ((rig.ground_height() - h) / p_ref_virt.y()) * p_ref_virt;
      const Vec3 stepwise = rig.virt_to_ego().apply(p_virt);
      EXPECT_LT((stepwise - p).norm(), 1e-12 * std::max(1.0, p.norm()));
      ++checked;
    }
  }
  EXPECT_GT(checked, 5000);
}

TEST(LiftHeight, MonotoneGroundRange) {
  const CameraRig rig = pose_rig(5.0, 10.0);
  double prev = 1e18;
  for (double h = -1.0; h < 4.9; h += 0.1) {
    const Vec3 p = lift_pixel_height(700.0, 700.0, h, rig);
    const double range = Vec2(p.x() - rig.camera_center().x(), p.y() - rig.camera_center().y()).norm();
    EXPECT_LT(range, prev);
    prev = range;
  }
}

TEST(LiftHeight, SamePointFromCleanAndPerturbedRig) {
  Rng rng(7);
  const CameraRig clean = pose_rig(6.0, 12.0);
  for (int i = 0; i < 200; ++i) {
    const CameraRig noisy = perturb_rig(clean, {rng.normal(0.0, 1.67), rng.normal(0.0, 1.67)});
    const Vec3 p(rng.uniform(15.0, 80.0), rng.uniform(-10.0, 10.0), rng.uniform(0.0, 2.0));
    const auto a = clean.project(p);
    const auto b = noisy.project(p);
    ASSERT_TRUE(a && b);
    if (!clean.intrinsics().contains(a->u, a->v) || !noisy.intrinsics().contains(b->u, b->v)) continue;
    EXPECT_LT((lift_pixel_height(a->u, a->v, p.z(), clean) - p).norm(), 1e-6);
    EXPECT_LT((lift_pixel_height(b->u, b->v, p.z(), noisy) - p).norm(), 1e-6);
  }
}

TEST(LiftDepth, ReferencePlaneAndErrors) {
  const CameraRig rig = pose_rig(5.0, 10.0);
  const Vec3 ref = pixel_to_ref_cam(300.0, 600.0, rig.intrinsics());
  EXPECT_LT((lift_pixel_depth(300.0, 600.0, 1.0, rig) - rig.cam_to_ego().apply(ref)).norm(), 1e-15);
  EXPECT_NEAR(rig.to_camera(lift_pixel_depth(300.0, 600.0, 104.0, rig)).z(), 104.0, 1e-12);
  for (double d : {0.0, -3.0}) {
    try {
      lift_pixel_depth(300.0, 600.0, d, rig);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kNonPositiveDepth);
    }
  }
}

TEST(LiftDepth, AgreesWithHeightLiftOnGround) {
  Rng rng(8);
  for (int r = 0; r < 20; ++r) {
    const CameraRig rig = test::random_rig(rng);
    for (int s = 0; s < 50; ++s) {
      const double u = rng.uniform(0, 1536), v = rng.uniform(500, 864);
      const LiftResult hr = try_lift_pixel_height(u, v, 0.0, rig);
      if (!hr.ok()) continue;
      const Vec3 truth = test::ray_plane_oracle(rig, u, v, 0.0);
      const double depth = rig.to_camera(truth).z();
      const double tol = 1e-9 * std::max(1.0, truth.norm() / 10.0);
      EXPECT_LT((hr.point - truth).norm(), tol);
      EXPECT_LT((lift_pixel_depth(u, v, depth, rig) - hr.point).norm(), tol);
    }
  }
}

TEST(BuildWedge, SingleCellOneHot) {
  const CameraRig rig = pose_rig(5.0, 10.0);
  ContextMap ctx(1, 1, 2);
  ctx.data = {2.0, 3.0};
  const BinSpec one{BinStrategy::kUniform, 1, -1.0, 1.0, 1.0};
  const WedgeCloud cloud = build_wedge(fuse(ctx, one_hot(1, 1, 1, 0)), one, rig, 864);
  ASSERT_EQ(cloud.size(), 1u);
  EXPECT_LT((cloud.positions[0] - lift_pixel_height(432.0, 432.0, 0.0, rig)).norm(), 1e-12);
  EXPECT_EQ(cloud.weights[0], 1.0);
  EXPECT_EQ(cloud.feature(0)[1], 3.0);

  const BinSpec eight{BinStrategy::kUniform, 8, -1.0, 1.0, 1.0};
  const WedgeCloud multi = build_wedge(fuse(ctx, one_hot(1, 1, 8, 5)), eight, rig, 864);
  int nonzero = 0;
  for (std::size_t p = 0; p < multi.size(); ++p) {
    if (multi.weights[p] == 0.0) continue;
    ++nonzero;
    EXPECT_LT((multi.positions[p] - lift_pixel_height(432.0, 432.0, bin_to_value(5, eight), rig)).norm(), 1e-12);
  }
  EXPECT_EQ(nonzero, 1);
}

TEST(BuildWedge, LoopOracle4x4) {
  Rng rng(12);
  const CameraRig rig = pose_rig(5.0, 30.0);
  const int stride = 216;  // 4x4 cells covering the full 864x864 left square
  const BinSpec bins{BinStrategy::kDynamicIncreasing, 8, -1.0, 1.0, 1.5};
  const ContextMap ctx = random_context(4, 4, 3, rng);
  const DistributionMap dist = random_dist(4, 4, 8, rng);
  const WedgeCloud cloud = build_wedge(fuse(ctx, dist), bins, rig, stride);
  ASSERT_EQ(cloud.size(), 128u);
  EXPECT_EQ(cloud.horizon_skipped_cells, 0u);
  std::size_t p = 0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const std::size_t m = static_cast<std::size_t>(r) * 4 + c;
      for (int i = 0; i < 8; ++i, ++p) {
        const Vec3 oracle = lift_pixel_height((c + 0.5) * stride, (r + 0.5) * stride, bin_to_value(i, bins), rig);
        EXPECT_LT((cloud.positions[p] - oracle).norm(), 1e-9);
        EXPECT_EQ(cloud.weights[p], dist.cell(m)[i]);
        for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(cloud.feature(p)[ch], ctx.cell(m)[ch]);
      }
    }
  }
}

TEST(BuildWedge, DepthLoopOracle4x4) {
  Rng rng(13);
  const CameraRig rig = pose_rig(5.0, 10.0);
  const int stride = 216;
  const BinSpec bins{BinStrategy::kDepthUniform, 8, 1.0, 50.0, 1.0};
  const ContextMap ctx = random_context(4, 4, 3, rng);
  const DistributionMap dist = random_dist(4, 4, 8, rng);
  const WedgeCloud cloud = build_wedge_depth(fuse(ctx, dist), bins, rig, stride);
  ASSERT_EQ(cloud.size(), 128u);
  std::size_t p = 0;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int i = 0; i < 8; ++i, ++p) {
        const Vec3 oracle = lift_pixel_depth((c + 0.5) * stride, (r + 0.5) * stride, bin_to_value(i, bins), rig);
        EXPECT_LT((cloud.positions[p] - oracle).norm(), 1e-9);
        EXPECT_EQ(cloud.weights[p], dist.cell(static_cast<std::size_t>(r) * 4 + c)[i]);
      }
}

TEST(BuildWedge, HorizonCellsSkippedAndCounted) {
  Rng rng(14);
  const CameraRig rig = pose_rig(5.0, 0.0);  // rows above cy see no ground
  const int w = 96, h = 54, stride = 16;
  const BinSpec hb = default_height_bins();
  const BinSpec db = default_depth_bins();
  const ContextMap ctx = random_context(w, h, 2, rng);
  const WedgeCloud height = build_wedge(fuse(ctx, random_dist(w, h, hb.n_bins, rng)), hb, rig, stride);
  const WedgeCloud depth = build_wedge_depth(fuse(ctx, random_dist(w, h, db.n_bins, rng)), db, rig, stride);
  EXPECT_EQ(height.horizon_skipped_cells, static_cast<std::size_t>(27 * w));
  EXPECT_EQ(height.size(), static_cast<std::size_t>(27 * w * 90));
  EXPECT_EQ(depth.size(), static_cast<std::size_t>(w * h * 206));
  EXPECT_LT(height.size(), depth.size());
}

TEST(BuildWedge, Validation) {
  Rng rng(15);
  const CameraRig rig = pose_rig(5.0, 10.0);
  const ContextMap ctx = random_context(2, 2, 1, rng);
  const BinSpec hb{BinStrategy::kUniform, 4, -1, 1, 1};
  try {
    build_wedge(fuse(ctx, random_dist(2, 2, 4, rng)), hb, rig, 1000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
  EXPECT_THROW(build_wedge(fuse(ctx, random_dist(2, 2, 5, rng)), hb, rig, 16), Error);
  EXPECT_THROW(build_wedge_depth(fuse(ctx, random_dist(2, 2, 4, rng)), hb, rig, 16), Error);
  try {
    build_wedge(fuse(ctx, random_dist(2, 2, 4, rng)), {BinStrategy::kUniform, 4, 0, 6, 1}, rig, 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAboveCamera);
  }
}

TEST(WedgeCloud, AppendOffsetsFeatureRows) {
  WedgeCloud a, b;
  a.channels = b.channels = 1;
  const double fa = 1.0, fb = 2.0;
  a.add_point(Vec3::Zero(), 1.0, a.add_feature_row({&fa, 1}));
  b.add_point(Vec3::Ones(), 0.5, b.add_feature_row({&fb, 1}));
  a.append(b);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a.feature(1)[0], 2.0);
  WedgeCloud c;
  c.channels = 3;
  EXPECT_THROW(a.append(c), Error);
}

}  // namespace
}  // namespace hlift
