int dummy_test_config;
