int dummy_test_device;
