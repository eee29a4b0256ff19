// Copyright 2026 The iod-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "iodlab/protocol/registration.hpp"
#include "iodlab/protocol/session.hpp"
#include "reference.hpp"

using namespace iodlab;

namespace {

ref::Buf raw(const Digest& d) { return ref::Buf(d.raw().begin(), d.raw().end()); }

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an iodlab::Error";
  return ErrorKind::io;
}

/// One registered user and drone, plus everything a test needs to run Fig. 3 by hand.
struct World {
  const Group& group;
  Rng rng;
  Identity user_id;
  Password password;
  ServerDatabase db;
  DroneStore drone;
  MobileDeviceStore device;

  World(GroupId id, std::uint64_t seed, std::string uid = "alice", std::string pw = "pw1",
        std::string did = "drone-1")
      : group(group_for(id)),
        rng(seed),
        user_id(std::move(uid)),
        password(std::move(pw)),
        db(id, group.random_scalar(rng)),
        drone(register_drone(Identity(std::move(did)))),
        device(register_user()) {}

  DroneStore register_drone(const Identity& did) {
    auto r = server_register_drone(std::move(db), did, group.random_scalar(rng));
    db = std::move(r.db);
    return provision_drone(r.response);
  }

  MobileDeviceStore register_user() {
    Scalar d = group.random_scalar(rng);
    auto r = server_register_user(std::move(db), user_id, user_register_request(user_id, password, d),
                                  group.random_scalar(rng), group.random_scalar(rng));
    db = std::move(r.db);
    return provision_device(d, r.response, {DirectoryEntry{drone.id, drone.pid}});
  }

  LoginStart login(Timestamp t1) {
    return user_login_start(group, device, user_id, password, drone.pid, t1, group.random_scalar(rng));
  }
};

}  // namespace

// Registration: user side -----------------------------------------------------

TEST(UserRegisterRequest, Deterministic) {
  const Group& g = group_for(GroupId::toy);
  Scalar d = g.scalar_from_u64(7);
  EXPECT_EQ(user_register_request(Identity("alice"), Password("pw1"), d),
            user_register_request(Identity("alice"), Password("pw1"), d));
}

TEST(UserRegisterRequest, IdentityEqualsPasswordHashesZero) {
  const Group& g = group_for(GroupId::toy);
  EXPECT_EQ(user_register_request(Identity("same"), Password("same"), g.scalar_from_u64(3)), hash(Digest().encoded()));
}

// Frozen from tests/oracle/reference.py (hashlib composition).
TEST(UserRegisterRequest, FixedVector) {
  const Group& g = group_for(GroupId::toy);
  EXPECT_EQ(user_register_request(Identity("alice"), Password("pw1"), g.scalar_from_u64(7)).hex(),
            "25cf5c91c1a5b8ebf4fe41757f51fbfb706df2e66a6a05951405e6924d471dd5");
}

TEST(ServerRegisterUser, FixedVector) {
  const Group& g = group_for(GroupId::toy);
  ServerDatabase db(GroupId::toy, g.scalar_from_u64(3));
  Digest ppw = user_register_request(Identity("alice"), Password("pw1"), g.scalar_from_u64(7));
  auto r = server_register_user(db, Identity("alice"), ppw, g.scalar_from_u64(5), g.scalar_from_u64(9));
  EXPECT_EQ(r.response.f, g.scalar_from_u64(5));
  EXPECT_EQ(r.response.k.hex(), "9501ef3b0f069387b6d0f24da922d53f8da977aac5f8fc8be2e070f1d253e4fe");
  EXPECT_EQ(r.response.b.hex(), "c23396178a75330ac129b5994f02e092691c45e719ce9c0867c042c1d14d7764");
  ASSERT_EQ(r.db.users().size(), 1u);
  const UserRecord& rec = r.db.users().begin()->second;
  EXPECT_EQ(rec.fid.hex(), "390da77253f57217d3d3c79fd65d1f204208eb91ba34a0916b425130be8de187");
  EXPECT_EQ(rec.k, r.response.k);
  EXPECT_EQ(rec.id.str(), "alice");
  // the input database is untouched
  EXPECT_TRUE(db.users().empty());
}

TEST(ServerRegisterUser, DistinctNoncesGiveDistinctPseudonyms) {
  const Group& g = group_for(GroupId::curve);
  Rng rng(11);
  ServerDatabase db(GroupId::curve, g.random_scalar(rng));
  Digest ppw = user_register_request(Identity("u"), Password("p"), g.random_scalar(rng));
  auto a = server_register_user(db, Identity("u"), ppw, g.random_scalar(rng), g.random_scalar(rng));
  auto b = server_register_user(db, Identity("u"), ppw, g.random_scalar(rng), g.random_scalar(rng));
  EXPECT_NE(a.db.users().begin()->first, b.db.users().begin()->first);
}

TEST(ServerRegisterUser, DuplicateIdentity) {
  const Group& g = group_for(GroupId::toy);
  ServerDatabase db(GroupId::toy, g.scalar_from_u64(3));
  Digest ppw = user_register_request(Identity("alice"), Password("pw1"), g.scalar_from_u64(7));
  auto r = server_register_user(db, Identity("alice"), ppw, g.scalar_from_u64(5), g.scalar_from_u64(9));
  EXPECT_EQ(kind_of([&] {
              server_register_user(r.db, Identity("alice"), ppw, g.scalar_from_u64(6), g.scalar_from_u64(2));
            }),
            ErrorKind::duplicate_identity);
}

TEST(ProvisionDevice, FieldsPassThroughAndLoginWorks) {
  World w(GroupId::toy, 1);
  EXPECT_TRUE(credentials_match(w.device, w.user_id, w.password));
  EXPECT_FALSE(credentials_match(w.device, w.user_id, Password("pw2")));
  const UserRecord& rec = w.db.users().begin()->second;
  EXPECT_EQ(w.device.k, rec.k);
  EXPECT_NO_THROW(w.login(Timestamp{10}));
}

TEST(ProvisionDevice, EmptyDirectoryMeansUnknownDrone) {
  World w(GroupId::toy, 2);
  w.device.drone_directory.clear();
  EXPECT_EQ(kind_of([&] { w.login(Timestamp{10}); }), ErrorKind::unknown_drone);
}

// Registration: drone side ----------------------------------------------------

TEST(ServerRegisterDrone, FixedVector) {
  const Group& g = group_for(GroupId::toy);
  ServerDatabase db(GroupId::toy, g.scalar_from_u64(3));
  auto r = server_register_drone(db, Identity("drone-1"), g.scalar_from_u64(4));
  EXPECT_EQ(r.response.pid.hex(), "ae73b761b44add21b78cc4ec3f21f1beaf4d5cef5656fba04ec0cab46bec45c7");
  EXPECT_EQ(r.response.key.hex(), "0169a14d6aa1f097548ec3534b1571b8d7fc3ed0d9ee0d95735bb1e5b909041d");
  ASSERT_NE(r.db.find_drone(r.response.pid), nullptr);
  EXPECT_EQ(provision_drone(r.response).key, r.response.key);
}

TEST(ServerRegisterDrone, DuplicateIdentityRequestsAnother) {
  const Group& g = group_for(GroupId::toy);
  ServerDatabase db(GroupId::toy, g.scalar_from_u64(3));
  auto r = server_register_drone(db, Identity("drone-1"), g.scalar_from_u64(4));
  EXPECT_EQ(kind_of([&] { server_register_drone(r.db, Identity("drone-1"), g.scalar_from_u64(5)); }),
            ErrorKind::duplicate_identity);
}

TEST(ServerRegisterDrone, DistinctNoncesGiveDistinctPseudonyms) {
  const Group& g = group_for(GroupId::toy);
  ServerDatabase db(GroupId::toy, g.scalar_from_u64(3));
  auto a = server_register_drone(db, Identity("drone-1"), g.scalar_from_u64(4));
  auto b = server_register_drone(db, Identity("drone-1"), g.scalar_from_u64(5));
  EXPECT_NE(a.response.pid, b.response.pid);
}

TEST(Identity, Bounds) {
  EXPECT_THROW(Identity(""), Error);
  EXPECT_THROW(Identity(std::string(65, 'x')), Error);
  EXPECT_NO_THROW(Identity(std::string(64, 'x')));
  EXPECT_THROW(Password(std::string("\xff\xfe")), Error);
  EXPECT_NO_THROW(Identity("drön"));
}

// Login and authentication ----------------------------------------------------

TEST(UserLoginStart, WrongPasswordRejected) {
  World w(GroupId::curve, 3);
  EXPECT_EQ(kind_of([&] {
              user_login_start(w.group, w.device, w.user_id, Password("wrong"), w.drone.pid, Timestamp{1},
                               w.group.random_scalar(w.rng));
            }),
            ErrorKind::session_rejected);
  EXPECT_EQ(kind_of([&] {
              user_login_start(w.group, w.device, Identity("mallory"), w.password, w.drone.pid, Timestamp{1},
                               w.group.random_scalar(w.rng));
            }),
            ErrorKind::session_rejected);
}

TEST(UserLoginStart, LoginTagMatchesReference) {
  World w(GroupId::curve, 4);
  LoginStart ls = w.login(Timestamp{123456});
  const UserRecord& rec = w.db.users().begin()->second;
  EXPECT_EQ(ls.m1.fid, rec.fid);
  EXPECT_EQ(ls.m1.pid, w.drone.pid);
  EXPECT_EQ(raw(ls.m1.a1), ref::hcat({ref::u64be(123456), raw(rec.fid), raw(rec.k)}));
  EXPECT_EQ(ls.m1.z, w.group.mul_base(ls.state.z));
}

TEST(UserLoginStart, PseudonymFixedAcrossLogins) {
  World w(GroupId::toy, 5);
  EXPECT_EQ(w.login(Timestamp{1}).m1.fid, w.login(Timestamp{900}).m1.fid);
}

TEST(ServerProcessM1, StaleTimestamp) {
  World w(GroupId::toy, 6);
  LoginStart ls = w.login(Timestamp{1000});
  EXPECT_EQ(kind_of([&] { server_process_m1(w.db, ls.m1, Timestamp{1000 + kDefaultDeltaT + 1}, kDefaultDeltaT); }),
            ErrorKind::stale_timestamp);
  EXPECT_NO_THROW(server_process_m1(w.db, ls.m1, Timestamp{1000 + kDefaultDeltaT}, kDefaultDeltaT));
  // receive time before send time is measured by absolute difference
  EXPECT_EQ(kind_of([&] { server_process_m1(w.db, ls.m1, Timestamp{0}, 999); }), ErrorKind::stale_timestamp);
}

TEST(ServerProcessM1, EveryA1ByteFlipIsRejected) {
  World w(GroupId::toy, 7);
  LoginStart ls = w.login(Timestamp{50});
  for (std::size_t i = 0; i < Digest::kSize; ++i) {
    M1 bad = ls.m1;
    bad.a1[i] ^= 0x01;
    EXPECT_EQ(kind_of([&] { server_process_m1(w.db, bad, Timestamp{60}, kDefaultDeltaT); }),
              ErrorKind::auth_failure)
        << i;
  }
}

TEST(ServerProcessM1, UnknownParties) {
  World w(GroupId::toy, 8);
  LoginStart ls = w.login(Timestamp{50});
  M1 bad_user = ls.m1, bad_drone = ls.m1;
  bad_user.fid[0] ^= 0x80;
  bad_drone.pid[0] ^= 0x80;
  EXPECT_EQ(kind_of([&] { server_process_m1(w.db, bad_user, Timestamp{60}, kDefaultDeltaT); }),
            ErrorKind::unknown_user);
  EXPECT_EQ(kind_of([&] { server_process_m1(w.db, bad_drone, Timestamp{60}, kDefaultDeltaT); }),
            ErrorKind::unknown_drone);
}

TEST(ServerProcessM1, KeyTransportIsXor) {
  World w(GroupId::curve, 9);
  LoginStart ls = w.login(Timestamp{50});
  M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{60}, kDefaultDeltaT);
  EXPECT_EQ(xor_digests(m2.k_ij, w.drone.key), w.db.users().begin()->second.k);
  EXPECT_EQ(m2.z, ls.m1.z);
  EXPECT_EQ(m2.fid, ls.m1.fid);
  EXPECT_EQ(m2.t2, Timestamp{60});
}

// Faithful to the scheme: there is no nonce cache, so an in-window replay passes.
TEST(ServerProcessM1, ReplayInsideWindowAccepted) {
  World w(GroupId::toy, 10);
  LoginStart ls = w.login(Timestamp{1000});
  M2 first = server_process_m1(w.db, ls.m1, Timestamp{1010}, kDefaultDeltaT);
  M2 replay = server_process_m1(w.db, ls.m1, Timestamp{1000 + kDefaultDeltaT}, kDefaultDeltaT);
  EXPECT_EQ(first.a3, replay.a3);
  EXPECT_EQ(first.k_ij, replay.k_ij);
}

TEST(DroneProcessM2, RecoversUserKey) {
  World w(GroupId::curve, 12);
  LoginStart ls = w.login(Timestamp{0});
  M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
  auto resp = drone_process_m2(w.group, w.drone, m2, Timestamp{9}, kDefaultDeltaT, w.group.random_scalar(w.rng));
  SessionKey sk = user_process_m3(w.group, ls.state, resp.m3, Timestamp{12}, kDefaultDeltaT);
  EXPECT_EQ(sk, resp.sk);
}

TEST(DroneProcessM2, KijByteFlipRejected) {
  World w(GroupId::toy, 13);
  LoginStart ls = w.login(Timestamp{0});
  M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
  Scalar g = w.group.random_scalar(w.rng);
  for (std::size_t i = 0; i < Digest::kSize; ++i) {
    M2 bad = m2;
    bad.k_ij[i] ^= 0x40;
    EXPECT_EQ(kind_of([&] { drone_process_m2(w.group, w.drone, bad, Timestamp{9}, kDefaultDeltaT, g); }),
              ErrorKind::auth_failure);
  }
}

TEST(DroneProcessM2, NotForMeAndStale) {
  World w(GroupId::toy, 14);
  LoginStart ls = w.login(Timestamp{0});
  M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
  Scalar g = w.group.random_scalar(w.rng);
  DroneStore other = w.drone;
  other.pid[3] ^= 1;
  EXPECT_EQ(kind_of([&] { drone_process_m2(w.group, other, m2, Timestamp{9}, kDefaultDeltaT, g); }),
            ErrorKind::not_for_me);
  EXPECT_EQ(kind_of([&] { drone_process_m2(w.group, w.drone, m2, Timestamp{5 + kDefaultDeltaT + 1}, kDefaultDeltaT, g); }),
            ErrorKind::stale_timestamp);
}

// Oracle: brute-force the drone's view. Recover z_i from M2.Z by exhaustive
// discrete log and rebuild sk_j from scratch.
TEST(DroneProcessM2, SessionKeyMatchesBruteForceOracle) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    World w(GroupId::toy, seed);
    LoginStart ls = w.login(Timestamp{0});
    M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
    Scalar g = w.group.random_scalar(w.rng);
    auto resp = drone_process_m2(w.group, w.drone, m2, Timestamp{9}, kDefaultDeltaT, g);

    auto z = ref::toy_dlog(m2.z.encoded()[0]);
    ASSERT_TRUE(z.has_value());
    unsigned shared = ref::toy_pow(m2.z.encoded()[0], g.encoded()[0]);
    EXPECT_EQ(shared, ref::toy_pow(ref::kG, *z * g.encoded()[0] % 11));
    const UserRecord& rec = w.db.users().begin()->second;
    EXPECT_EQ(raw(resp.sk.sk), ref::toy_session_key("drone-1", shared, raw(rec.k), raw(rec.fid)));
  }
}

TEST(UserProcessM3, RandomReplacementOfGIsRejected) {
  World w(GroupId::curve, 15);
  for (int trial = 0; trial < 100; ++trial) {
    LoginStart ls = w.login(Timestamp{0});
    M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
    auto resp = drone_process_m2(w.group, w.drone, m2, Timestamp{9}, kDefaultDeltaT, w.group.random_scalar(w.rng));
    M3 bad = resp.m3;
    bad.g = w.group.mul_base(w.group.random_scalar(w.rng));
    ASSERT_NE(bad.g, resp.m3.g);
    EXPECT_EQ(kind_of([&] { user_process_m3(w.group, ls.state, bad, Timestamp{12}, kDefaultDeltaT); }),
              ErrorKind::auth_failure);
  }
}

TEST(UserProcessM3, StaleAndSingleUse) {
  World w(GroupId::toy, 16);
  LoginStart ls = w.login(Timestamp{0});
  M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
  auto resp = drone_process_m2(w.group, w.drone, m2, Timestamp{9}, kDefaultDeltaT, w.group.random_scalar(w.rng));
  UserSessionState copy = ls.state;
  EXPECT_EQ(kind_of([&] { user_process_m3(w.group, ls.state, resp.m3, Timestamp{9 + kDefaultDeltaT + 1}, kDefaultDeltaT); }),
            ErrorKind::stale_timestamp);
  EXPECT_EQ(kind_of([&] { user_process_m3(w.group, ls.state, resp.m3, Timestamp{12}, kDefaultDeltaT); }),
            ErrorKind::state_consumed);
  EXPECT_EQ(user_process_m3(w.group, copy, resp.m3, Timestamp{12}, kDefaultDeltaT), resp.sk);
}

// Properties ------------------------------------------------------------------

TEST(Properties, KeyAgreementBothGroups) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    World w(seed % 2 ? GroupId::curve : GroupId::toy, seed, "user" + std::to_string(seed),
            "pw-" + std::to_string(seed * 31), "uav" + std::to_string(seed % 7));
    Timestamp t{seed * 1000};
    LoginStart ls = w.login(t);
    M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{t.ms + 7}, kDefaultDeltaT);
    auto resp = drone_process_m2(w.group, w.drone, m2, Timestamp{t.ms + 14}, kDefaultDeltaT,
                                 w.group.random_scalar(w.rng));
    EXPECT_EQ(user_process_m3(w.group, ls.state, resp.m3, Timestamp{t.ms + 21}, kDefaultDeltaT), resp.sk);
  }
}

// Flip each byte of each digest field of M1, M2, M3 and check that the run
// fails. Every field except M2.FID_i is rejected by the very next verifier;
// M2.FID_i is not covered by A3_i, so the drone answers and the user's Auth
// check catches it one hop later.
TEST(Properties, TamperingAnyDigestFieldBreaksTheSession) {
  World w(GroupId::toy, 77);
  LoginStart ls = w.login(Timestamp{0});
  M2 m2 = server_process_m1(w.db, ls.m1, Timestamp{5}, kDefaultDeltaT);
  Scalar g = w.group.random_scalar(w.rng);
  auto resp = drone_process_m2(w.group, w.drone, m2, Timestamp{9}, kDefaultDeltaT, g);

  auto server_rejects = [&](const M1& m1) {
    try {
      server_process_m1(w.db, m1, Timestamp{5}, kDefaultDeltaT);
    } catch (const Error& e) {
      return e.is_protocol_rejection();
    }
    return false;
  };
  auto drone_rejects = [&](const M2& bad) {
    try {
      drone_process_m2(w.group, w.drone, bad, Timestamp{9}, kDefaultDeltaT, g);
    } catch (const Error& e) {
      return e.is_protocol_rejection();
    }
    return false;
  };
  auto user_rejects = [&](const M3& bad) {
    UserSessionState st = ls.state;
    try {
      user_process_m3(w.group, st, bad, Timestamp{12}, kDefaultDeltaT);
    } catch (const Error& e) {
      return e.is_protocol_rejection();
    }
    return false;
  };

  int cases = 0;
  for (std::size_t i = 0; i < Digest::kSize; ++i) {
    for (Digest M1::*field : {&M1::a1, &M1::fid, &M1::pid}) {
      M1 bad = ls.m1;
      (bad.*field)[i] ^= 0x01;
      EXPECT_TRUE(server_rejects(bad));
      ++cases;
    }
    for (Digest M2::*field : {&M2::a3, &M2::pid, &M2::k_ij}) {
      M2 bad = m2;
      (bad.*field)[i] ^= 0x01;
      EXPECT_TRUE(drone_rejects(bad));
      ++cases;
    }
    {
      M2 bad = m2;
      bad.fid[i] ^= 0x01;
      auto forwarded = drone_process_m2(w.group, w.drone, bad, Timestamp{9}, kDefaultDeltaT, g);
      EXPECT_TRUE(user_rejects(forwarded.m3));
      ++cases;
    }
    M3 bad = resp.m3;
    bad.auth[i] ^= 0x01;
    EXPECT_TRUE(user_rejects(bad));
    ++cases;
  }
  EXPECT_EQ(cases, 8 * 32);
}

TEST(Properties, PseudonymsDoNotCollideAcrossUsers) {
  const Group& g = group_for(GroupId::curve);
  Rng rng(31337);
  ServerDatabase empty(GroupId::curve, g.random_scalar(rng));
  std::set<Digest> fids;
  for (int i = 0; i < 10000; ++i) {
    Identity id("user-" + std::to_string(i));
    auto r = server_register_user(empty, id, Digest(), g.random_scalar(rng), g.random_scalar(rng));
    fids.insert(r.db.users().begin()->first);
  }
  EXPECT_EQ(fids.size(), 10000u);
}
